#include "ssep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "ssep/errors.hpp"

namespace ssep {

double GeneratorMatrix::max_exit_rate() const {
  double r = 0.0;
  for (std::size_t i = 0; i < dim; ++i) r = std::max(r, -entry(i, i));
  return r;
}

double GeneratorMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k];
  return s;
}

double GeneratorMatrix::entry(std::size_t i, std::size_t j) const {
  for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    if (col[k] == j) return val[k];
  }
  return 0.0;
}

std::size_t GeneratorMatrix::transition_count(std::size_t i) const {
  std::size_t n = 0;
  for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    if (col[k] != i && val[k] != 0.0) ++n;
  }
  return n;
}

void GeneratorMatrix::write_coo(std::ostream& out) const {
  out << "# ssep-generator v1 dim=" << dim << " nnz=" << val.size() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < dim; ++i) {
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %u %.17g\n", i, col[k], val[k]);
      out << buf;
    }
  }
}

TupleSpace::TupleSpace(std::size_t vertex_count, std::size_t m, std::size_t cap) : n_(vertex_count), m_(m) {
  if (m == 0) throw ValidationError("tuple length must be at least 1");
  if (m > n_) throw ValidationError("tuple length exceeds the number of vertices");
  tail_count_.assign(m, 1);
  for (std::size_t i = m; i-- > 1;) tail_count_[i - 1] = tail_count_[i] * (n_ - i);
  // size = n (n-1) ... (n-m+1), checked against the cap as it grows
  long double total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= static_cast<long double>(n_ - i);
  if (total > static_cast<long double>(cap)) {
    throw CapExceeded("tuple state space has " + std::to_string(static_cast<double>(total)) +
                      " states; cap is " + std::to_string(cap));
  }
  size_ = static_cast<std::size_t>(total);
}

std::size_t TupleSpace::rank(std::span<const std::uint32_t> tuple) const {
  if (tuple.size() != m_) throw ValidationError("tuple has the wrong length");
  std::size_t r = 0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (tuple[i] >= n_) throw ValidationError("tuple entry outside the ball");
    std::size_t smaller_used = 0;
    for (std::size_t j = 0; j < i; ++j) {
      if (tuple[j] == tuple[i]) throw ValidationError("tuple entries must be distinct");
      if (tuple[j] < tuple[i]) ++smaller_used;
    }
    r += (tuple[i] - smaller_used) * tail_count_[i];
  }
  return r;
}

void TupleSpace::unrank(std::size_t r, std::span<std::uint32_t> out) const {
  for (std::size_t i = 0; i < m_; ++i) {
    std::size_t pick = r / tail_count_[i];
    r %= tail_count_[i];
    // pick-th unused vertex in increasing order
    std::uint32_t v = 0;
    while (true) {
      bool used = false;
      for (std::size_t j = 0; j < i; ++j) used |= out[j] == v;
      if (!used) {
        if (pick == 0) break;
        --pick;
      }
      ++v;
    }
    out[i] = v;
  }
}

namespace {

struct CsrBuilder {
  GeneratorMatrix g;
  std::vector<std::pair<std::uint32_t, double>> row;

  explicit CsrBuilder(std::size_t dim) {
    g.dim = dim;
    g.row_ptr.reserve(dim + 1);
    g.row_ptr.push_back(0);
  }
  void add(std::uint32_t j, double rate) { row.emplace_back(j, rate); }
  void finish_row(std::uint32_t i) {
    double out = 0.0;
    for (const auto& [j, r] : row) out += r;
    row.emplace_back(i, -out);
    std::sort(row.begin(), row.end());
    for (const auto& [j, r] : row) {
      g.col.push_back(j);
      g.val.push_back(r);
    }
    g.row_ptr.push_back(static_cast<std::uint32_t>(g.col.size()));
    row.clear();
  }
};

}  // namespace

GeneratorMatrix build_ssep_generator(const Ball& ball, std::size_t cap) {
  const std::size_t nv = ball.vertex_count();
  if (nv >= 63 || (std::size_t{1} << nv) > cap) {
    throw CapExceeded("SSEP state space 2^" + std::to_string(nv) + " exceeds cap " + std::to_string(cap));
  }
  const std::size_t dim = std::size_t{1} << nv;
  CsrBuilder b(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    for (std::size_t e = 0; e < ball.edge_count(); ++e) {
      const auto u = ball.edge_parent(e), v = ball.edge_child(e);
      if (((s >> u) & 1U) != ((s >> v) & 1U)) {
        b.add(static_cast<std::uint32_t>(s ^ ((std::size_t{1} << u) | (std::size_t{1} << v))), 1.0);
      }
    }
    b.finish_row(static_cast<std::uint32_t>(s));
  }
  return std::move(b.g);
}

GeneratorMatrix build_stirring_generator(const Ball& ball, std::size_t m, std::size_t cap) {
  const TupleSpace space(ball.vertex_count(), m, cap);
  CsrBuilder b(space.size());
  std::vector<std::uint32_t> tuple(m), next(m);
  for (std::size_t r = 0; r < space.size(); ++r) {
    space.unrank(r, tuple);
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& inc : ball.incident(tuple[i])) {
        next = tuple;
        const auto hit = std::find(tuple.begin(), tuple.end(), inc.neighbor);
        if (hit == tuple.end()) {
          next[i] = inc.neighbor;
        } else {
          const auto j = static_cast<std::size_t>(hit - tuple.begin());
          if (j < i) continue;  // the shared edge is added once, from the lower component
          std::swap(next[i], next[j]);
        }
        b.add(static_cast<std::uint32_t>(space.rank(next)), 1.0);
      }
    }
    b.finish_row(static_cast<std::uint32_t>(r));
  }
  return std::move(b.g);
}

std::vector<double> semigroup_apply(const GeneratorMatrix& gen, std::span<const double> v, double t) {
  if (!(t >= 0)) throw ValidationError("semigroup_apply: t must be >= 0");
  if (v.size() != gen.dim) throw ValidationError("semigroup_apply: vector has the wrong dimension");
  std::vector<double> out(v.begin(), v.end());
  const double rate = gen.max_exit_rate();
  if (t == 0 || rate == 0) return out;

  const double mu = rate * t;
  constexpr double kTail = 1e-12;
  std::vector<double> term(v.begin(), v.end()), av(gen.dim);
  std::fill(out.begin(), out.end(), 0.0);
  double cumulative = 0.0;
  const auto view = gen.view();
  for (std::size_t k = 0;; ++k) {
    const double w = std::exp(-mu + static_cast<double>(k) * std::log(mu) - std::lgamma(static_cast<double>(k) + 1));
    simd::axpy(w, term, out);
    cumulative += w;
    if (static_cast<double>(k) > mu && 1.0 - cumulative < kTail) break;
    if (k > 100000 + 10 * static_cast<std::size_t>(mu)) {
      throw InternalError("semigroup_apply: Poisson series failed to converge");
    }
    // term <- P term with P = I + A / rate
    simd::csr_matvec(view, term, av);
    simd::axpy(1.0 / rate, av, term);
  }
  return out;
}

std::vector<double> resolvent_solve(const GeneratorMatrix& gen, double lambda, std::size_t source) {
  if (!(lambda > 0)) throw ValidationError("resolvent: lambda must be > 0");
  if (source >= gen.dim) throw ValidationError("resolvent: source index out of range");
  const auto n = static_cast<Eigen::Index>(gen.dim);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(gen.val.size());
  for (std::size_t i = 0; i < gen.dim; ++i) {
    for (auto k = gen.row_ptr[i]; k < gen.row_ptr[i + 1]; ++k) {
      const double a = (gen.col[k] == i ? lambda : 0.0) - gen.val[k];
      trips.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(gen.col[k]), a);
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[static_cast<Eigen::Index>(source)] = 1.0;

  Eigen::VectorXd x;
  if (gen.dim <= 20000) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(m);
    if (solver.info() != Eigen::Success) throw InternalError("resolvent: factorization failed");
    x = solver.solve(rhs);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> solver(m);
    solver.setTolerance(1e-14);
    solver.setMaxIterations(100000);
    x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw InternalError("resolvent: iterative solve did not converge");
  }
  return {x.data(), x.data() + x.size()};
}

double green_function_srw(int degree) {
  if (degree < 2) throw ValidationError("degree must be >= 2");
  const double d = degree;
  return d / (d * d - 1);
}

double sigma_occupation_exact(int degree, double p) {
  if (!(p > 0 && p < 1)) throw ValidationError("density p must lie in (0, 1)");
  return 2 * p * (1 - p) * green_function_srw(degree);
}

}  // namespace ssep
