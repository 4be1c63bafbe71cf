#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "ssep/graphical.hpp"
#include "ssep/observables.hpp"
#include "ssep/stirring.hpp"

namespace ssep {

/// Weight of one unordered edge {y,z} in the generator. The generator is
/// written as half a double sum over ordered neighbor pairs, which counts
/// every unordered edge twice; summing unordered edges once therefore
/// carries weight 1. The carre du champ L(G^2) - 2 G LG and the
/// Feynman-Kac exponent use the same weight. Every edge sum in this module
/// goes through this constant.
inline constexpr double kEdgeWeight = 1.0;

/// kEdgeWeight * sum over ball edges of g(eta^{yz}) - g(eta).
double apply_generator(const std::function<double(const Configuration&)>& g, const Configuration& eta);

/// Source of G^F_lambda values along a path.
class GProvider {
 public:
  virtual ~GProvider() = default;
  virtual double value(const Configuration& eta) const = 0;
  /// out[e] = G(eta^e) - G(eta) for every ball edge e, given g_eta = G(eta).
  virtual void edge_deltas(const Configuration& eta, double g_eta, std::vector<double>& out) const;
  /// True when residuals are exact (to rounding); false for statistical contracts.
  virtual bool is_exact() const = 0;
  virtual double lambda() const = 0;
  virtual const LocalFunction& function() const = 0;
};

/// G from an exact resolvent table on the ball.
class ExactG final : public GProvider {
 public:
  ExactG(std::shared_ptr<const Ball> ball, LocalFunction f, double lambda, std::size_t cap = kDefaultTupleStateCap);

  double value(const Configuration& eta) const override;
  bool is_exact() const override { return true; }
  double lambda() const override { return table_.lambda(); }
  const LocalFunction& function() const override { return f_; }
  const ResolventTable& table() const { return table_; }

 private:
  LocalFunction f_;
  ResolventTable table_;
  std::vector<std::uint32_t> flat_tuples_;  // unranked tuples, m entries each
};

/// G estimated by resolvent_mc_G. The stream is keyed by a hash of the
/// configuration, so repeated queries at the same eta return the same value.
class MonteCarloG final : public GProvider {
 public:
  MonteCarloG(LocalFunction f, double lambda, std::size_t reps, std::uint64_t seed);

  double value(const Configuration& eta) const override;
  bool is_exact() const override { return false; }
  double lambda() const override { return lambda_; }
  const LocalFunction& function() const override { return f_; }

 private:
  LocalFunction f_;
  double lambda_;
  std::size_t reps_;
  std::uint64_t seed_;
};

/// max |LG - lambda G + F| over the given configurations.
double verify_generator_identity(const GProvider& g, std::span<const Configuration> configs);
/// Same, over all 2^|V| configurations of the ball (|V| <= 20).
double verify_generator_identity_exhaustive(const GProvider& g, std::shared_ptr<const Ball> ball);

struct DecompositionRecord {
  std::uint64_t path_id = 0;
  double t = 0.0;
  double lambda = 0.0;
  double xi = 0.0;
  double M = 0.0;
  double remainder = 0.0;
  double J = 0.0;
  double residual = 0.0;
};

/// Realizes xi_t = M_t - (G(eta_t) - G(eta_0) - lambda int G) along one
/// path. Every integrand is constant between events, so each integral is
/// an exact sum over inter-event intervals.
DecompositionRecord decompose_path(const Configuration& eta0, const EventLog& log, double t, const GProvider& g,
                                   std::uint64_t path_id = 0);

/// J_t = int_0^t kEdgeWeight * sum_edges (G(eta^e) - G(eta))^2 ds.
double quadratic_variation(const Configuration& eta0, const EventLog& log, double t, const GProvider& g);

void write_decomposition_csv(std::ostream& out, std::span<const DecompositionRecord> records);

/// Exponential martingale exp{theta (G_t - G_0) - int kEdgeWeight sum_e (e^{theta dG_e} - 1)} at s = t,
/// theta = c a_t / t, for one path.
double exp_martingale_value(const Configuration& eta0, const EventLog& log, double t, double theta,
                            const GProvider& g);

struct ExpMartingaleResult {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
  std::size_t reps = 0;
};

/// Mean of the exponential martingale over `reps` stationary paths on the
/// ball; replicate i draws eta_0 and its clocks from stream (seed, i). The
/// provider must be built with lambda = t^{-1/2}. Throws ValidationError
/// when |theta| * 2 K_H / lambda is large enough to risk overflow.
ExpMartingaleResult exp_martingale_check(std::shared_ptr<const Ball> ball, const GProvider& g, double p, double c,
                                         double t, double a_t, std::size_t reps, std::uint64_t seed);

/// eta_0 ~ nu_p and the clock log for replicate stream `rng`, drawn from two
/// fixed substreams.
std::pair<Configuration, EventLog> sample_stationary_path(std::shared_ptr<const Ball> ball, double p,
                                                          double horizon, const RngStream& rng);

}  // namespace ssep
