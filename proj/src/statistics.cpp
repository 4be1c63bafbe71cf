#include "ssep/statistics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ssep/errors.hpp"
#include "ssep/rng.hpp"
#include "ssep/simd.hpp"
#include "ssep/stirring.hpp"

namespace ssep {

double RatePoint::gap() const { return std::fabs(empirical + theoretical); }

double mean(std::span<const double> x) {
  if (x.empty()) throw ValidationError("mean of an empty sample");
  return simd::sum(x) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("variance needs at least two samples");
  const double m = mean(x);
  std::vector<double> c(x.begin(), x.end());
  for (auto& v : c) v -= m;
  return simd::dot(c, c) / static_cast<double>(x.size() - 1);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

EstimateCI estimate_sigma_empirical(std::span<const XiRecord> samples) {
  if (samples.size() < 30) throw ValidationError("sigma estimate needs at least 30 samples");
  const double t = samples.front().t;
  if (!(t > 0)) throw ValidationError("sigma estimate needs t > 0");
  std::vector<double> x;
  x.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.t != t) throw ValidationError("sigma estimate: samples have mixed t values");
    x.push_back(s.xi);
  }
  const auto n = static_cast<double>(x.size());
  const double m = mean(x);
  for (auto& v : x) v -= m;
  const double s2 = simd::dot(x, x);
  const double var = s2 / (n - 1);
  // delete-one variances of the centered data, in closed form
  double jk_sum = 0.0, jk_sum2 = 0.0;
  for (double v : x) {
    const double mi = -v / (n - 1);
    const double vi = (s2 - v * v - (n - 1) * mi * mi) / (n - 2);
    jk_sum += vi;
    jk_sum2 += vi * vi;
  }
  const double jk_mean = jk_sum / n;
  const double jk_var = std::max(0.0, jk_sum2 / n - jk_mean * jk_mean);
  const double se = std::sqrt((n - 1) * jk_var);
  return {var / t, se / t, x.size(), "empirical"};
}

double duality_cutoff(const LocalFunction& f, int degree, double tol) {
  validate_degree(degree);
  if (!(tol > 0)) throw ValidationError("tolerance must be > 0");
  const double g = std::pow(std::sqrt(static_cast<double>(degree)) - 1, 2);
  const double k = f.sup_norm();
  const double m = static_cast<double>(f.m());
  const double lead = 2 * k * k * m * m / g;
  if (lead <= tol) return 0.0;
  return std::log(lead / tol) / g;
}

std::vector<double> quadrature_grid(double cutoff, double h, double switch_at, double growth) {
  if (!(cutoff > 0) || !(h > 0) || !(growth > 1)) throw ValidationError("quadrature grid: bad parameters");
  std::vector<double> g{0.0};
  double u = 0.0;
  while (u + h < std::min(switch_at, cutoff)) {
    u = static_cast<double>(g.size()) * h;
    g.push_back(u);
  }
  double step = h;
  while (u < cutoff) {
    if (u >= switch_at) step *= growth;
    u = std::min(cutoff, u + step);
    g.push_back(u);
  }
  return g;
}

double product_expectation(const LocalFunction& f, std::span<const VertexAddr> ys, double p) {
  const auto& xs = f.sites();
  const auto m = xs.size();
  // union of sites; bit i of a pattern is the occupancy of union[i]
  std::vector<const VertexAddr*> uni;
  std::uint32_t xslot[kMaxLocalSites], yslot[kMaxLocalSites];
  auto slot_of = [&](const VertexAddr& v) -> std::uint32_t {
    for (std::size_t i = 0; i < uni.size(); ++i) {
      if (*uni[i] == v) return static_cast<std::uint32_t>(i);
    }
    uni.push_back(&v);
    return static_cast<std::uint32_t>(uni.size() - 1);
  };
  for (std::size_t i = 0; i < m; ++i) xslot[i] = slot_of(xs[i]);
  for (std::size_t i = 0; i < m; ++i) yslot[i] = slot_of(ys[i]);
  const auto k = uni.size();
  double total = 0.0;
  for (std::uint32_t w = 0; w < (1U << k); ++w) {
    std::uint32_t wx = 0, wy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      wx |= ((w >> xslot[i]) & 1U) << i;
      wy |= ((w >> yslot[i]) & 1U) << i;
    }
    const int ones = std::popcount(w);
    total += f(wx) * f(wy) * std::pow(p, ones) * std::pow(1 - p, static_cast<int>(k) - ones);
  }
  return total;
}

EstimateCI estimate_sigma_duality(const LocalFunction& f, const DualityOptions& opts) {
  require_centered(f, opts.p);
  validate_degree(opts.degree);
  if (opts.reps < 2) throw ValidationError("duality estimate needs at least two replicates");
  const double needed = duality_cutoff(f, opts.degree, opts.tolerance);
  if (opts.cutoff < needed) {
    throw ValidationError("duality cutoff U=" + std::to_string(opts.cutoff) + " too small for tolerance " +
                          std::to_string(opts.tolerance) + "; need U >= " + std::to_string(needed));
  }
  if (f.is_zero()) return {0.0, 0.0, opts.reps, "duality"};
  const auto grid = opts.grid.empty() ? quadrature_grid(opts.cutoff) : opts.grid;
  if (grid.size() < 2 || grid.front() != 0.0 || !std::is_sorted(grid.begin(), grid.end())) {
    throw ValidationError("duality grid must start at 0 and ascend");
  }
  const StirringTuple start(f.sites());
  std::vector<double> c(grid.size()), per_rep(opts.reps);
  for (std::size_t r = 0; r < opts.reps; ++r) {
    RngStream rng(opts.seed, r);
    const auto path = simulate_stirring_path(start, opts.degree, grid, rng);
    const StirringTuple* prev = nullptr;
    double prev_value = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (prev == nullptr || !(path[k] == *prev)) {
        prev_value = product_expectation(f, path[k].positions(), opts.p);
        prev = &path[k];
      }
      c[k] = prev_value;
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) integral += 0.5 * (c[k] + c[k - 1]) * (grid[k] - grid[k - 1]);
    per_rep[r] = 2 * integral;
  }
  const double v = mean(per_rep);
  const double se = std::sqrt(sample_variance(per_rep) / static_cast<double>(opts.reps));
  return {v, se, opts.reps, "duality"};
}

double kolmogorov_p_value(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

KsResult clt_test(std::span<const double> samples, double sigma, double t) {
  if (samples.empty()) throw ValidationError("KS test needs at least one sample");
  if (!(t > 0)) throw ValidationError("KS test needs t > 0");
  if (!(sigma >= 0)) throw ValidationError("KS test needs sigma >= 0");
  const bool all_zero = std::all_of(samples.begin(), samples.end(), [](double x) { return x == 0.0; });
  if (sigma == 0) {
    if (!all_zero) throw ValidationError("KS test: sigma = 0 but samples are not all zero");
    return {0.0, 1.0, samples.size()};
  }
  std::vector<double> z(samples.begin(), samples.end());
  const double scale = sigma * std::sqrt(t);
  for (auto& v : z) v /= scale;
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = standard_normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_p_value(d, z.size()), z.size()};
}

std::vector<RatePoint> tail_rate(std::span<const double> xi, double t, double a_t, std::span<const double> u_grid,
                                 double sigma2, std::vector<std::string>* warnings) {
  if (xi.empty()) throw ValidationError("tail rate needs samples");
  if (!(t > 0)) throw ValidationError("tail rate needs t > 0");
  if (!(a_t >= std::sqrt(t) && a_t <= t)) throw ValidationError("tail rate needs sqrt(t) <= a_t <= t");
  if (!(sigma2 > 0)) throw ValidationError("tail rate needs sigma^2 > 0");
  std::vector<RatePoint> out;
  for (double u : u_grid) {
    std::size_t hits = 0;
    for (double x : xi) hits += x / a_t >= u;
    if (hits == 0) {
      if (warnings) warnings->push_back("u=" + std::to_string(u) + ": no tail hits, point dropped");
      continue;
    }
    RatePoint pt;
    pt.u = u;
    pt.hits = hits;
    pt.samples = xi.size();
    pt.empirical = t / (a_t * a_t) * std::log(static_cast<double>(hits) / static_cast<double>(xi.size()));
    pt.theoretical = u * u / (2 * sigma2);
    out.push_back(pt);
  }
  return out;
}

double rate_functional_I(std::span<const double> f, double horizon, double sigma) {
  if (f.size() < 2) throw ValidationError("rate functional needs at least two grid points");
  if (!(horizon > 0) || !(sigma > 0)) throw ValidationError("rate functional needs T > 0 and sigma > 0");
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  if (std::fabs(f[0]) > 1e-12 * std::max(1.0, scale)) throw ValidationError("rate functional needs f(0) = 0");
  const std::size_t n = f.size();
  const double h = horizon / static_cast<double>(n - 1);
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / h;
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < n; ++i) integral += 0.5 * (d[i] * d[i] + d[i - 1] * d[i - 1]) * h;
  return integral / (2 * sigma * sigma);
}

void write_estimate_header(std::ostream& out) {
  out << "# ssep-estimates v1\n";
  out << "method,value,std_error,reps,params\n";
}

void write_estimate_row(std::ostream& out, const EstimateCI& e, const std::string& params) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%zu,", e.method.c_str(), e.value, e.std_error, e.reps);
  out << buf << params << '\n';
}

void write_rate_points(std::ostream& out, std::span<const RatePoint> points, double t, double a_t) {
  out << "# ssep-rates v1\n";
  out << "t,a_t,u,hits,samples,empirical,theoretical,gap\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%zu,%.17g,%.17g,%.17g\n", t, a_t, p.u, p.hits, p.samples,
                  p.empirical, p.theoretical, p.gap());
    out << buf;
  }
}

}  // namespace ssep
