#include "ssep/martingale.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ssep/errors.hpp"

namespace ssep {

double apply_generator(const std::function<double(const Configuration&)>& g, const Configuration& eta) {
  const double base = g(eta);
  double sum = 0.0;
  for (std::size_t e = 0; e < eta.ball().edge_count(); ++e) sum += g(eta.swapped(e)) - base;
  return kEdgeWeight * sum;
}

void GProvider::edge_deltas(const Configuration& eta, double g_eta, std::vector<double>& out) const {
  const Ball& ball = eta.ball();
  out.assign(ball.edge_count(), 0.0);
  Configuration scratch = eta;
  for (std::size_t e = 0; e < ball.edge_count(); ++e) {
    if (eta[ball.edge_parent(e)] == eta[ball.edge_child(e)]) continue;  // eta^e = eta
    scratch.swap_edge(e);
    out[e] = value(scratch) - g_eta;
    scratch.swap_edge(e);
  }
}

namespace {

StirringTuple tuple_of(const LocalFunction& f) { return StirringTuple(f.sites()); }

}  // namespace

ExactG::ExactG(std::shared_ptr<const Ball> ball, LocalFunction f, double lambda, std::size_t cap)
    : f_(std::move(f)), table_(exact_beta(std::move(ball), tuple_of(f_), lambda, cap)) {
  const auto& space = table_.space();
  flat_tuples_.resize(space.size() * space.m());
  for (std::size_t r = 0; r < space.size(); ++r) {
    space.unrank(r, std::span(flat_tuples_).subspan(r * space.m(), space.m()));
  }
}

double ExactG::value(const Configuration& eta) const {
  const auto m = f_.m();
  const auto& beta = table_.values();
  double g = 0.0;
  for (std::size_t r = 0; r < beta.size(); ++r) {
    std::uint32_t w = 0;
    const auto* tuple = &flat_tuples_[r * m];
    for (std::size_t i = 0; i < m; ++i) w |= std::uint32_t{eta[tuple[i]]} << i;
    g += f_(w) * beta[r];
  }
  return g;
}

MonteCarloG::MonteCarloG(LocalFunction f, double lambda, std::size_t reps, std::uint64_t seed)
    : f_(std::move(f)), lambda_(lambda), reps_(reps), seed_(seed) {
  if (!(lambda > 0)) throw ValidationError("lambda must be > 0");
  if (reps == 0) throw ValidationError("Monte Carlo G needs at least one replicate");
}

double MonteCarloG::value(const Configuration& eta) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto b : eta.occupancy()) h = mix64(h ^ b);
  RngStream rng(seed_, h);
  return resolvent_mc_G(eta, f_, lambda_, reps_, rng).value;
}

double verify_generator_identity(const GProvider& g, std::span<const Configuration> configs) {
  const double lambda = g.lambda();
  const auto& f = g.function();
  double worst = 0.0;
  std::vector<double> deltas;
  for (const auto& eta : configs) {
    const double ge = g.value(eta);
    g.edge_deltas(eta, ge, deltas);
    double lg = 0.0;
    for (double d : deltas) lg += d;
    lg *= kEdgeWeight;
    worst = std::max(worst, std::fabs(lg - lambda * ge + eval(f, eta)));
  }
  return worst;
}

double verify_generator_identity_exhaustive(const GProvider& g, std::shared_ptr<const Ball> ball) {
  const auto nv = ball->vertex_count();
  if (nv > 20) throw CapExceeded("exhaustive check needs |V| <= 20, ball has " + std::to_string(nv));
  std::vector<Configuration> all;
  all.reserve(std::size_t{1} << nv);
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << nv); ++s) all.push_back(Configuration::from_bits(ball, s));
  return verify_generator_identity(g, all);
}

namespace {

struct PathIntegrals {
  double g0 = 0.0;
  double gt = 0.0;
  double int_f = 0.0;
  double int_g = 0.0;
  double int_lg = 0.0;
  double int_j = 0.0;
};

PathIntegrals integrate_path(const Configuration& eta0, const EventLog& log, double t, const GProvider& g) {
  if (!(t >= 0 && t <= log.horizon())) throw ValidationError("path time outside [0, horizon]");
  if (&eta0.ball() != &log.ball()) throw ValidationError("configuration and event log live on different balls");
  const auto& f = g.function();
  PathIntegrals out;
  Configuration eta = eta0;
  std::vector<double> deltas;
  double last = 0.0;
  double ge = g.value(eta);
  out.g0 = ge;
  const auto events = log.events();
  const auto limit = log.count_until(t);
  for (std::size_t k = 0; k <= limit; ++k) {
    const double until = k < limit ? events[k].time : t;
    const double dt = until - last;
    if (dt > 0) {
      g.edge_deltas(eta, ge, deltas);
      double lg = 0.0, j = 0.0;
      for (double d : deltas) {
        lg += d;
        j += d * d;
      }
      out.int_f += eval(f, eta) * dt;
      out.int_g += ge * dt;
      out.int_lg += kEdgeWeight * lg * dt;
      out.int_j += kEdgeWeight * j * dt;
    }
    last = until;
    if (k < limit) {
      const auto e = events[k].edge;
      if (eta[eta.ball().edge_parent(e)] != eta[eta.ball().edge_child(e)]) {
        eta.swap_edge(e);
        ge = g.value(eta);
      }
    }
  }
  out.gt = ge;
  return out;
}

}  // namespace

DecompositionRecord decompose_path(const Configuration& eta0, const EventLog& log, double t, const GProvider& g,
                                   std::uint64_t path_id) {
  const auto p = integrate_path(eta0, log, t, g);
  DecompositionRecord r;
  r.path_id = path_id;
  r.t = t;
  r.lambda = g.lambda();
  r.xi = p.int_f;
  r.M = p.gt - p.g0 - p.int_lg;
  r.remainder = p.gt - p.g0 - g.lambda() * p.int_g;
  r.J = p.int_j;
  r.residual = r.xi - r.M + r.remainder;
  return r;
}

double quadratic_variation(const Configuration& eta0, const EventLog& log, double t, const GProvider& g) {
  return integrate_path(eta0, log, t, g).int_j;
}

void write_decomposition_csv(std::ostream& out, std::span<const DecompositionRecord> records) {
  out << "# ssep-decomposition v1\n";
  out << "path_id,t,lambda,xi,M,remainder,J,residual\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.path_id), r.t, r.lambda, r.xi, r.M, r.remainder, r.J,
                  r.residual);
    out << buf;
  }
}

double exp_martingale_value(const Configuration& eta0, const EventLog& log, double t, double theta,
                            const GProvider& g) {
  if (theta == 0.0) return 1.0;
  if (!(t >= 0 && t <= log.horizon())) throw ValidationError("path time outside [0, horizon]");
  Configuration eta = eta0;
  std::vector<double> deltas;
  double ge = g.value(eta);
  const double g0 = ge;
  double exponent = 0.0;
  double last = 0.0;
  const auto events = log.events();
  const auto limit = log.count_until(t);
  for (std::size_t k = 0; k <= limit; ++k) {
    const double until = k < limit ? events[k].time : t;
    const double dt = until - last;
    if (dt > 0) {
      g.edge_deltas(eta, ge, deltas);
      double rate = 0.0;
      for (double d : deltas) rate += std::expm1(theta * d);
      exponent -= kEdgeWeight * rate * dt;
    }
    last = until;
    if (k < limit) {
      const auto e = events[k].edge;
      if (eta[eta.ball().edge_parent(e)] != eta[eta.ball().edge_child(e)]) {
        eta.swap_edge(e);
        ge = g.value(eta);
      }
    }
  }
  exponent += theta * (ge - g0);
  if (exponent > 700) throw ValidationError("exponential martingale overflow: exponent " + std::to_string(exponent));
  return std::exp(exponent);
}

std::pair<Configuration, EventLog> sample_stationary_path(std::shared_ptr<const Ball> ball, double p,
                                                          double horizon, const RngStream& rng) {
  auto occ_rng = rng.substream(1);
  auto eta0 = sample_nu_p(ball, p, occ_rng);
  auto log = EventLog::sample(ball, horizon, rng.substream(2));
  return {std::move(eta0), std::move(log)};
}

ExpMartingaleResult exp_martingale_check(std::shared_ptr<const Ball> ball, const GProvider& g, double p, double c,
                                         double t, double a_t, std::size_t reps, std::uint64_t seed) {
  if (!(t > 0)) throw ValidationError("exp martingale: t must be > 0");
  if (reps < 2) throw ValidationError("exp martingale: needs at least two replicates");
  const double theta = c * a_t / t;
  // |G| <= K_H / lambda, so |theta dG| <= 2 |theta| K_H / lambda per edge.
  const double bound = 2 * std::fabs(theta) * g.function().sup_norm() / g.lambda();
  if (bound > 20) {
    throw ValidationError("exp martingale: |c| a_t K_H / (t lambda) too large (" + std::to_string(bound / 2) +
                          "); reduce |c|");
  }
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    auto [eta0, log] = sample_stationary_path(ball, p, t, RngStream(seed, i));
    const double v = exp_martingale_value(eta0, log, t, theta, g);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(reps);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
  return {mean, std::sqrt(var / n), var, reps};
}

}  // namespace ssep
