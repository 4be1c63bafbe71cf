#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ssep/simd.hpp"
#include "ssep/tree.hpp"

namespace ssep {

inline constexpr std::size_t kDefaultSsepStateCap = std::size_t{1} << 20;
inline constexpr std::size_t kDefaultTupleStateCap = 200000;

/// Sparse CTMC generator in CSR form, diagonal included. Both builders below
/// produce symmetric matrices (every transition has rate 1 both ways), so
/// acting on functions and on distributions coincide.
struct GeneratorMatrix {
  std::size_t dim = 0;
  std::vector<std::uint32_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  simd::CsrView view() const { return {row_ptr, col, val}; }
  /// Largest total exit rate, max_i -A_ii.
  double max_exit_rate() const;
  double row_sum(std::size_t i) const;
  double entry(std::size_t i, std::size_t j) const;
  std::size_t transition_count(std::size_t i) const;

  /// "# ssep-generator v1 dim=<n> nnz=<k>" then "row col value" lines, 0-based.
  void write_coo(std::ostream& out) const;
};

/// Ordered m-tuples of distinct ball vertices, ranked lexicographically by
/// vertex index.
class TupleSpace {
 public:
  TupleSpace(std::size_t vertex_count, std::size_t m, std::size_t cap = kDefaultTupleStateCap);

  std::size_t vertex_count() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t size() const { return size_; }

  std::size_t rank(std::span<const std::uint32_t> tuple) const;
  void unrank(std::size_t r, std::span<std::uint32_t> out) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::size_t size_;
  std::vector<std::size_t> tail_count_;  // tail_count_[i] = (n-i-1)(n-i-2)...(n-m+1)
};

/// SSEP on {0,1}^V: state index has bit v set iff vertex v is occupied.
GeneratorMatrix build_ssep_generator(const Ball& ball, std::size_t cap = kDefaultSsepStateCap);

/// m-particle stirring on the ball: a rate-1 clock per edge exchanges
/// whatever sits at its endpoints, so a component steps to a vacant
/// neighbor at rate 1 and two adjacent components swap at rate 1.
GeneratorMatrix build_stirring_generator(const Ball& ball, std::size_t m,
                                         std::size_t cap = kDefaultTupleStateCap);

/// e^{tA} v by uniformization, truncating once the Poisson tail is < 1e-12.
std::vector<double> semigroup_apply(const GeneratorMatrix& gen, std::span<const double> v, double t);

/// Solves (lambda I - A) beta = delta_source.
std::vector<double> resolvent_solve(const GeneratorMatrix& gen, double lambda, std::size_t source);

/// Integral over [0, inf) of the return probability of simple random walk
/// on T_d (jump rate d+1): d / (d^2 - 1).
double green_function_srw(int degree);

/// Variance limit of the occupation-time functional: 2 p (1-p) d / (d^2 - 1).
double sigma_occupation_exact(int degree, double p);

}  // namespace ssep
