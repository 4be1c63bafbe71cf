#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "ssep/graphical.hpp"
#include "ssep/observables.hpp"
#include "ssep/oracle.hpp"
#include "ssep/rng.hpp"
#include "ssep/tree.hpp"

namespace ssep {

/// Ordered tuple of distinct vertices: the state of m stirring walks.
class StirringTuple {
 public:
  explicit StirringTuple(std::vector<VertexAddr> positions);
  const std::vector<VertexAddr>& positions() const { return positions_; }
  std::size_t m() const { return positions_.size(); }
  const VertexAddr& operator[](std::size_t i) const { return positions_[i]; }
  bool operator==(const StirringTuple&) const = default;

 private:
  std::vector<VertexAddr> positions_;
};

/// Stirring walks on the ball for `duration`, positions as vertex indices.
/// Uses thinning against the bulk rate m(d+1): a proposed step outside the
/// ball is void, a proposed step onto another component is a swap accepted
/// with probability 1/2 (that edge was proposed from both ends).
void simulate_stirring(const Ball& ball, std::span<std::uint32_t> positions, double duration, RngStream& rng);

/// Same dynamics on the infinite tree in word coordinates.
StirringTuple simulate_stirring(const StirringTuple& start, int degree, double duration, RngStream& rng);

/// Records positions at each of the ascending `times`; out[k] holds the
/// tuple at times[k].
std::vector<StirringTuple> simulate_stirring_path(const StirringTuple& start, int degree,
                                                  std::span<const double> times, RngStream& rng);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// Q^1_u(x, z) for simple random walk on the infinite tree.
McEstimate heat_kernel_mc(const VertexAddr& x, const VertexAddr& z, int degree, double u, std::size_t reps,
                          RngStream& rng);

/// G^F_lambda(eta) = E[H(eta, X_T)] / lambda with T ~ Exp(lambda), X the
/// stirring walks on eta's ball started from F's sites.
McEstimate resolvent_mc_G(const Configuration& eta, const LocalFunction& f, double lambda, std::size_t reps,
                          RngStream& rng);

/// Exact beta_lambda over the ball's ordered m-tuples.
class ResolventTable {
 public:
  ResolventTable(std::shared_ptr<const Ball> ball, std::vector<std::uint32_t> source, double lambda,
                 std::vector<double> values);

  double lambda() const { return lambda_; }
  const Ball& ball() const { return *ball_; }
  const std::shared_ptr<const Ball>& ball_ptr() const { return ball_; }
  const std::vector<std::uint32_t>& source() const { return source_; }
  const TupleSpace& space() const { return space_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::span<const std::uint32_t> tuple) const { return values_[space_.rank(tuple)]; }

  /// "# ssep-resolvent v1 ..." then "tuple,value" rows; tuple entries are
  /// dotted words separated by ';'.
  void write_csv(std::ostream& out) const;

 private:
  std::shared_ptr<const Ball> ball_;
  std::vector<std::uint32_t> source_;
  double lambda_;
  TupleSpace space_;
  std::vector<double> values_;
};

ResolventTable exact_beta(std::shared_ptr<const Ball> ball, const StirringTuple& source, double lambda,
                          std::size_t cap = kDefaultTupleStateCap);

/// sum over tuples y of H(eta(y_1..y_m)) beta(y).
double exact_G(const Configuration& eta, const LocalFunction& f, const ResolventTable& table);

}  // namespace ssep
