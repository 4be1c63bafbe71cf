#include "ssep/stirring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ssep/errors.hpp"

namespace ssep {

namespace {

template <class T>
void require_distinct(std::span<const T> xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] == xs[j]) throw ValidationError(std::string(what) + ": positions must be distinct");
    }
  }
}

// Neighbor k of v on the infinite tree: k = 0 is the father for non-root v,
// the rest are children in letter order.
VertexAddr tree_neighbor(const VertexAddr& v, int degree, std::uint64_t k) {
  if (v.is_root()) return v.child(static_cast<int>(k), degree);
  if (k == 0) return v.father();
  return v.child(static_cast<int>(k - 1), degree);
}

// One thinned proposal on the infinite tree; returns true if anything moved.
void tree_step(std::vector<VertexAddr>& pos, int degree, RngStream& rng) {
  const auto m = pos.size();
  const auto i = static_cast<std::size_t>(rng.below(m));
  const auto w = tree_neighbor(pos[i], degree, rng.below(static_cast<std::uint64_t>(degree) + 1));
  const auto hit = std::find(pos.begin(), pos.end(), w);
  if (hit == pos.end()) {
    pos[i] = w;
  } else if (rng.bernoulli(0.5)) {
    std::swap(pos[i], *hit);
  }
}

}  // namespace

StirringTuple::StirringTuple(std::vector<VertexAddr> positions) : positions_(std::move(positions)) {
  if (positions_.empty()) throw ValidationError("stirring tuple needs at least one position");
  require_distinct<VertexAddr>(positions_, "stirring tuple");
}

void simulate_stirring(const Ball& ball, std::span<std::uint32_t> positions, double duration, RngStream& rng) {
  if (!(duration >= 0)) throw ValidationError("stirring duration must be >= 0");
  require_distinct<std::uint32_t>(positions, "stirring");
  const auto m = positions.size();
  const double bulk = static_cast<double>(m) * (ball.degree() + 1);
  double clock = rng.exponential(bulk);
  while (clock <= duration) {
    const auto i = static_cast<std::size_t>(rng.below(m));
    const auto k = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(ball.degree()) + 1));
    const auto& inc = ball.incident(positions[i]);
    if (k < inc.size()) {
      const auto w = inc[k].neighbor;
      const auto hit = std::find(positions.begin(), positions.end(), w);
      if (hit == positions.end()) {
        positions[i] = w;
      } else if (rng.bernoulli(0.5)) {
        std::swap(positions[i], *hit);
      }
    }
    clock += rng.exponential(bulk);
  }
}

StirringTuple simulate_stirring(const StirringTuple& start, int degree, double duration, RngStream& rng) {
  const double t[1] = {duration};
  return simulate_stirring_path(start, degree, t, rng).front();
}

std::vector<StirringTuple> simulate_stirring_path(const StirringTuple& start, int degree,
                                                  std::span<const double> times, RngStream& rng) {
  validate_degree(degree);
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0)) {
    throw ValidationError("stirring path times must be ascending and >= 0");
  }
  std::vector<VertexAddr> pos = start.positions();
  const double bulk = static_cast<double>(pos.size()) * (degree + 1);
  std::vector<StirringTuple> out;
  out.reserve(times.size());
  double clock = rng.exponential(bulk);
  for (double t : times) {
    while (clock <= t) {
      tree_step(pos, degree, rng);
      clock += rng.exponential(bulk);
    }
    out.emplace_back(pos);
  }
  return out;
}

McEstimate heat_kernel_mc(const VertexAddr& x, const VertexAddr& z, int degree, double u, std::size_t reps,
                          RngStream& rng) {
  validate_degree(degree);
  if (!(u > 0)) throw ValidationError("heat kernel time must be > 0");
  if (reps == 0) throw ValidationError("heat kernel needs at least one replicate");
  std::size_t hits = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    VertexAddr pos = x;
    double clock = rng.exponential(degree + 1.0);
    while (clock <= u) {
      pos = tree_neighbor(pos, degree, rng.below(static_cast<std::uint64_t>(degree) + 1));
      clock += rng.exponential(degree + 1.0);
    }
    hits += pos == z;
  }
  const double q = static_cast<double>(hits) / static_cast<double>(reps);
  return {q, std::sqrt(q * (1 - q) / static_cast<double>(reps)), reps};
}

McEstimate resolvent_mc_G(const Configuration& eta, const LocalFunction& f, double lambda, std::size_t reps,
                          RngStream& rng) {
  if (!(lambda > 0)) throw ValidationError("resolvent: lambda must be > 0");
  if (reps == 0) throw ValidationError("resolvent: needs at least one replicate");
  const Ball& ball = eta.ball();
  std::vector<std::uint32_t> start;
  for (const auto& s : f.sites()) start.push_back(ball.index_of(s));
  if (f.is_zero()) return {0.0, 0.0, reps};
  std::vector<std::uint32_t> pos(start.size());
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    pos = start;
    simulate_stirring(ball, pos, rng.exponential(lambda), rng);
    const double h = f(pattern_of(pos, eta));
    sum += h;
    sum2 += h * h;
  }
  const double n = static_cast<double>(reps);
  const double mean = sum / n;
  const double var = reps > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
  return {mean / lambda, std::sqrt(var / n) / lambda, reps};
}

ResolventTable::ResolventTable(std::shared_ptr<const Ball> ball, std::vector<std::uint32_t> source, double lambda,
                               std::vector<double> values)
    : ball_(std::move(ball)),
      source_(std::move(source)),
      lambda_(lambda),
      space_(ball_->vertex_count(), source_.size(), values.size()),
      values_(std::move(values)) {
  if (values_.size() != space_.size()) throw ValidationError("resolvent table has the wrong size");
}

void ResolventTable::write_csv(std::ostream& out) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", lambda_);
  out << "# ssep-resolvent v1 degree=" << ball_->degree() << " radius=" << ball_->radius() << " lambda=" << buf
      << " source=";
  for (std::size_t i = 0; i < source_.size(); ++i) out << (i ? ";" : "") << ball_->vertex(source_[i]).to_string();
  out << "\ntuple,value\n";
  std::vector<std::uint32_t> tuple(source_.size());
  for (std::size_t r = 0; r < values_.size(); ++r) {
    space_.unrank(r, tuple);
    for (std::size_t i = 0; i < tuple.size(); ++i) out << (i ? ";" : "") << ball_->vertex(tuple[i]).to_string();
    std::snprintf(buf, sizeof buf, ",%.17g\n", values_[r]);
    out << buf;
  }
}

ResolventTable exact_beta(std::shared_ptr<const Ball> ball, const StirringTuple& source, double lambda,
                          std::size_t cap) {
  std::vector<std::uint32_t> src;
  for (const auto& v : source.positions()) src.push_back(ball->index_of(v));
  const TupleSpace space(ball->vertex_count(), src.size(), cap);
  const auto gen = build_stirring_generator(*ball, src.size(), cap);
  auto beta = resolvent_solve(gen, lambda, space.rank(src));
  return ResolventTable(std::move(ball), std::move(src), lambda, std::move(beta));
}

double exact_G(const Configuration& eta, const LocalFunction& f, const ResolventTable& table) {
  if (&eta.ball() != &table.ball()) {
    if (eta.ball().degree() != table.ball().degree() || eta.ball().radius() != table.ball().radius()) {
      throw ValidationError("exact_G: configuration and table live on different balls");
    }
  }
  if (f.m() != table.source().size()) throw ValidationError("exact_G: table was built for a different m");
  for (std::size_t i = 0; i < f.m(); ++i) {
    if (table.ball().index_of(f.sites()[i]) != table.source()[i]) {
      throw ValidationError("exact_G: table was built for different sites");
    }
  }
  std::vector<std::uint32_t> tuple(f.m());
  double g = 0.0;
  const auto& beta = table.values();
  for (std::size_t r = 0; r < beta.size(); ++r) {
    table.space().unrank(r, tuple);
    g += f(pattern_of(tuple, eta)) * beta[r];
  }
  return g;
}

}  // namespace ssep
