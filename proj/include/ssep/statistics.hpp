#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssep/observables.hpp"

namespace ssep {

struct EstimateCI {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  std::string method;
};

struct RatePoint {
  double u = 0.0;
  double empirical = 0.0;    // (t / a_t^2) log P(xi / a_t >= u)
  double theoretical = 0.0;  // u^2 / (2 sigma^2)
  std::size_t hits = 0;
  std::size_t samples = 0;
  /// |empirical + theoretical|: the empirical rate is a log-probability
  /// (<= 0) and the theoretical one its limiting magnitude.
  double gap() const;
};

/// Var(xi_t) / t with a delete-one jackknife standard error. Needs >= 30
/// samples sharing one t. Callers are responsible for F being centered.
EstimateCI estimate_sigma_empirical(std::span<const XiRecord> samples);

/// Smallest cutoff U with 2 K_H^2 m^2 e^{-U g} / g < tol, g = (sqrt d - 1)^2.
double duality_cutoff(const LocalFunction& f, int degree, double tol);

/// Time grid on [0, U]: step `h` up to `switch_at`, then geometric with ratio `growth`.
std::vector<double> quadrature_grid(double cutoff, double h = 0.05, double switch_at = 2.0, double growth = 1.05);

struct DualityOptions {
  int degree = 2;
  double p = 0.5;
  double cutoff = 0.0;        // U
  double tolerance = 1e-3;    // bound on the neglected tail of the covariance integral
  std::vector<double> grid;   // empty: quadrature_grid(cutoff)
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
};

/// sigma^2 = 2 int_0^U C(u) du, with C(u) the average over stirring walks
/// Y_u from F's sites of the exact product-measure expectation
/// E[H(eta, x) H(eta, Y_u)]. Walks live on the infinite tree. Replicate i
/// uses stream (seed, i). Refuses a cutoff below duality_cutoff().
EstimateCI estimate_sigma_duality(const LocalFunction& f, const DualityOptions& opts);

/// E_{nu_p}[H(eta(x_1..x_m)) H(eta(y_1..y_m))], exact over the union of sites.
double product_expectation(const LocalFunction& f, std::span<const VertexAddr> ys, double p);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample KS test of samples / (sigma sqrt t) against N(0,1).
KsResult clt_test(std::span<const double> samples, double sigma, double t);
/// Asymptotic Kolmogorov tail P(D_n > d) with the small-n correction.
double kolmogorov_p_value(double d, std::size_t n);

/// Tail-rate table. Points with no tail hits are dropped and reported in
/// `warnings` when it is non-null.
std::vector<RatePoint> tail_rate(std::span<const double> xi, double t, double a_t, std::span<const double> u_grid,
                                 double sigma2, std::vector<std::string>* warnings = nullptr);

/// (1 / (2 sigma^2)) int_0^T f'(s)^2 ds for f sampled on a uniform grid over
/// [0, T]; finite-difference derivative, trapezoid rule. f[0] must be 0.
double rate_functional_I(std::span<const double> f, double horizon, double sigma);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double sample_variance(std::span<const double> x);
double standard_normal_cdf(double x);

/// "method,value,std_error,reps,params" rows.
void write_estimate_header(std::ostream& out);
void write_estimate_row(std::ostream& out, const EstimateCI& e, const std::string& params);
void write_rate_points(std::ostream& out, std::span<const RatePoint> points, double t, double a_t);

}  // namespace ssep
