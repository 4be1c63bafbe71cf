// Acceptance runner: one PASS/FAIL line per criterion A1..A10.
//
//   ssep_acceptance [--only A3] [--cli path/to/ssep] [--workers n] [--seed s]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ssep/experiments.hpp"
#include "ssep/martingale.hpp"
#include "ssep/oracle.hpp"
#include "ssep/statistics.hpp"
#include "ssep/stirring.hpp"

namespace {

using namespace ssep;

// Pinned tolerances.
constexpr double kIdentityTol = 1e-10;
constexpr double kResidualTol = 1e-8;
constexpr double kSigmaRelTol = 0.05;
constexpr double kKsAlpha = 0.01;
constexpr int kKsRunsNeeded = 9;
constexpr double kSeTimes = 3.0;
constexpr double kTruncationSeTimes = 2.0;
constexpr std::size_t kMinTailHits = 10;
constexpr double kDualityTol = 1e-8;
constexpr double kFastRuntime = 10.0;  // seconds, A1 and A2

struct Context {
  std::uint64_t seed = 12345;
  unsigned workers = 1;
  std::string cli;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::shared_ptr<const Ball> make_ball(int d, int r) { return std::make_shared<const Ball>(build_ball(d, r)); }

Outcome a1_generator_identity(const Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  auto star = make_ball(2, 1);
  double worst_star = 0;
  for (double lambda : {0.5, 1.0}) {
    const ExactG g(star, occupation_function(VertexAddr::root(), 0.5), lambda);
    worst_star = std::max(worst_star, verify_generator_identity_exhaustive(g, star));
  }
  auto ball = make_ball(2, 2);
  const ExactG g(ball, product_function(VertexAddr::root(), VertexAddr({0}, 2), 0.5), 0.5);
  std::vector<Configuration> configs;
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) configs.push_back(sample_nu_p(ball, 0.5, rng));
  const double worst_pair = verify_generator_identity(g, configs);
  const double secs = seconds_since(t0);
  return {worst_star < kIdentityTol && worst_pair < kIdentityTol && secs < kFastRuntime,
          "ball(2,1) exhaustive max " + fmt("%.2e", worst_star) + ", ball(2,2) m=2 max " + fmt("%.2e", worst_pair) +
              " (tol 1e-10), " + fmt("%.2f", secs) + " s"};
}

Outcome a2_decomposition(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  auto star = make_ball(2, 1);
  const ExactG g(star, occupation_function(VertexAddr::root(), 0.5), 1.0);
  double worst = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto [eta0, log] = sample_stationary_path(star, 0.5, 5.0, RngStream(ctx.seed, i));
    worst = std::max(worst, std::fabs(decompose_path(eta0, log, 5.0, g, i).residual));
  }
  const double secs = seconds_since(t0);
  return {worst < kResidualTol && secs < kFastRuntime,
          "100 paths, t=5, max |residual| " + fmt("%.2e", worst) + " (tol 1e-8), " + fmt("%.2f", secs) + " s"};
}

XiJob occupation_job(const Context& ctx, double t, int radius, std::size_t reps, std::uint64_t seed) {
  XiJob job;
  job.degree = 2;
  job.density = 0.5;
  job.radius = radius;
  job.times = {t};
  job.reps = reps;
  job.seed = seed;
  job.workers = ctx.workers;
  return job;
}

Outcome a3_sigma(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = occupation_function(VertexAddr::root(), 0.5);
  const double t = 40.0;
  const double oracle = sigma_occupation_exact(2, 0.5);
  const auto job = occupation_job(ctx, t, truncation_radius(2, 0, t, 3.0), 10000, ctx.seed);
  const auto emp = estimate_sigma_empirical(run_xi(job, f).records_at(0, job));
  DualityOptions o;
  o.cutoff = duality_cutoff(f, 2, o.tolerance);
  o.reps = 10000;
  o.seed = mix64(ctx.seed ^ 0xd1a1);
  const auto dual = estimate_sigma_duality(f, o);
  const double e_rel = std::fabs(emp.value - oracle) / oracle;
  const double d_rel = std::fabs(dual.value - oracle) / oracle;
  return {e_rel < kSigmaRelTol && d_rel < kSigmaRelTol,
          "oracle 1/3; empirical " + fmt("%.4f", emp.value) + "+-" + fmt("%.4f", emp.std_error) + " (" +
              fmt("%.1f", 100 * e_rel) + "%, R=" + std::to_string(job.radius) + "), duality " +
              fmt("%.4f", dual.value) + "+-" + fmt("%.4f", dual.std_error) + " (" + fmt("%.1f", 100 * d_rel) +
              "%), tol 5%, " + fmt("%.0f", seconds_since(t0)) + " s"};
}

Outcome a4_clt(const Context& ctx) {
  const auto f = occupation_function(VertexAddr::root(), 0.5);
  const double n_scale = 50.0, t = 1.0;
  const double sigma = std::sqrt(1.0 / 3);
  int good = 0;
  std::string ps;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const double horizon = t * n_scale;
    const auto job = occupation_job(ctx, horizon, truncation_radius(2, 0, horizon, 3.0), 2000, mix64(ctx.seed + k));
    auto samples = run_xi(job, f).column(0);
    for (auto& x : samples) x /= std::sqrt(n_scale);
    const auto ks = clt_test(samples, sigma, t);
    good += ks.p_value > kKsAlpha;
    ps += (k ? " " : "") + fmt("%.3f", ks.p_value);
  }
  return {good >= kKsRunsNeeded, std::to_string(good) + "/10 runs with p > 0.01 (need 9); p = " + ps};
}

struct MeanSe {
  double mean, se;
};
MeanSe mean_se(const std::vector<double>& x) {
  const double m = mean(x);
  return {m, std::sqrt(sample_variance(x) / static_cast<double>(x.size()))};
}

Outcome a5_martingales(const Context& ctx) {
  auto ball = make_ball(2, 2);
  const double t = 20.0;
  const double lambda = 1 / std::sqrt(t);
  const ExactG g(ball, occupation_function(VertexAddr::root(), 0.5), lambda);
  const std::size_t paths = 10000;
  std::vector<double> m(paths), bracket(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    const auto [eta0, log] = sample_stationary_path(ball, 0.5, t, RngStream(ctx.seed, i));
    const auto rec = decompose_path(eta0, log, t, g, i);
    m[i] = rec.M;
    bracket[i] = rec.M * rec.M - rec.J;
  }
  const auto ms = mean_se(m), bs = mean_se(bracket);
  bool ok = std::fabs(ms.mean) <= kSeTimes * ms.se && std::fabs(bs.mean) <= kSeTimes * bs.se;
  std::string detail = "lambda=t^-1/2; mean M " + fmt("%.4f", ms.mean) + "+-" + fmt("%.4f", ms.se) +
                       ", mean(M^2-J) " + fmt("%.4f", bs.mean) + "+-" + fmt("%.4f", bs.se);
  const double a_t = std::pow(t, 0.7);
  for (double c : {0.5, -0.5}) {
    const auto r = exp_martingale_check(ball, g, 0.5, c, t, a_t, paths, mix64(ctx.seed ^ 0xe4a));
    ok = ok && std::fabs(r.mean - 1) <= kSeTimes * r.std_error;
    detail += ", exp(c=" + fmt("%+.1f", c) + ") " + fmt("%.4f", r.mean) + "+-" + fmt("%.4f", r.std_error);
  }
  return {ok, detail + " (3 SE)"};
}

Outcome a6_truncation(const Context& ctx) {
  const auto f = occupation_function(VertexAddr::root(), 0.5);
  const double t = 40.0;
  const int r = truncation_radius(2, 0, t, 3.0);
  const auto job_r = occupation_job(ctx, t, r, 10000, ctx.seed);
  const auto job_r2 = occupation_job(ctx, t, r + 2, 10000, ctx.seed);
  const auto br = run_xi(job_r, f), br2 = run_xi(job_r2, f);
  const auto er = estimate_sigma_empirical(br.records_at(0, job_r));
  const auto er2 = estimate_sigma_empirical(br2.records_at(0, job_r2));
  const double diff = std::fabs(er.value - er2.value);
  const double bound = kTruncationSeTimes * std::hypot(er.std_error, er2.std_error);
  // sensitivity: a radius far below the policy does feel the boundary
  const auto job_small = occupation_job(ctx, t, 3, 10000, ctx.seed);
  const auto bs = run_xi(job_small, f);
  const auto es = estimate_sigma_empirical(bs.records_at(0, job_small));
  return {diff < bound, "R=" + std::to_string(r) + ": " + fmt("%.4f", er.value) + ", R+2: " + fmt("%.4f", er2.value) +
                            ", |diff| " + fmt("%.2e", diff) + " < 2 SE " + fmt("%.4f", bound) +
                            "; boundary visits " + std::to_string(br.boundary_visits) + "/" +
                            std::to_string(br2.boundary_visits) + " (R=3 control: " + fmt("%.4f", es.value) +
                            ", " + std::to_string(bs.boundary_visits) + " visits)"};
}

Outcome a7_heat(const Context& ctx) {
  bool ok = true;
  std::string detail;
  for (int d : {2, 3}) {
    for (double u : {0.5, 1.0, 2.0, 4.0}) {
      RngStream rng(mix64(ctx.seed ^ 0x4ea7), static_cast<std::uint64_t>(d * 100 + u * 10));
      const auto e = heat_kernel_mc(VertexAddr::root(), VertexAddr::root(), d, u, 100000, rng);
      const double bound = std::exp(-u * std::pow(std::sqrt(d) - 1, 2));
      const bool pass = e.value <= bound + kSeTimes * e.std_error;
      ok = ok && pass;
      detail += (detail.empty() ? "" : ", ") + std::string("d=") + std::to_string(d) + " u=" + fmt("%g", u) + " " +
                fmt("%.4f", e.value) + "<=" + fmt("%.4f", bound) + (pass ? "" : " (violated)");
    }
  }
  return {ok, detail};
}

Outcome a8_mdp(const Context& ctx) {
  const auto f = occupation_function(VertexAddr::root(), 0.5);
  const double sigma2 = sigma_occupation_exact(2, 0.5);
  const double gamma = 0.7;
  const std::vector<double> us{0.5, 1.0};
  const std::vector<std::pair<double, std::size_t>> plan{{50.0, 20000}, {200.0, 4000}};
  std::vector<std::vector<RatePoint>> table;
  bool all_finite = true;
  std::string detail;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto [t, reps] = plan[k];
    const double a_t = std::pow(t, gamma);
    const auto job = occupation_job(ctx, t, truncation_radius(2, 0, t, 3.0), reps, mix64(ctx.seed ^ k));
    const auto xi = run_xi(job, f).column(0);
    std::vector<std::string> warnings;
    table.push_back(tail_rate(xi, t, a_t, us, sigma2, &warnings));
    for (double u : us) {
      const auto it = std::find_if(table.back().begin(), table.back().end(), [&](const RatePoint& p) { return p.u == u; });
      const std::size_t hits = it == table.back().end() ? 0 : it->hits;
      const bool enough = hits >= kMinTailHits;
      all_finite = all_finite && enough;
      detail += (detail.empty() ? "" : "; ") + std::string("t=") + fmt("%g", t) + " u=" + fmt("%g", u) + " hits " +
                std::to_string(hits) + "/" + std::to_string(reps);
      if (it != table.back().end()) detail += " gap " + fmt("%.3f", it->gap());
    }
  }
  bool trend = false;
  for (double u : us) {
    const auto find = [&](const std::vector<RatePoint>& row) {
      return std::find_if(row.begin(), row.end(), [&](const RatePoint& p) { return p.u == u && p.hits >= kMinTailHits; });
    };
    const auto a = find(table[0]), b = find(table[1]);
    if (a != table[0].end() && b != table[1].end() && b->gap() <= a->gap()) trend = true;
  }
  detail += trend ? "; gap non-increasing at some u" : "; no u with a non-increasing gap";
  return {all_finite && trend, detail};
}

Outcome a9_duality(const Context&) {
  auto star = make_ball(2, 1);
  const auto ssep = build_ssep_generator(*star);
  const auto walk = build_stirring_generator(*star, 1);
  double worst = 0;
  for (double t : {0.3, 1.0}) {
    std::vector<std::vector<double>> q(4);
    for (std::size_t x = 0; x < 4; ++x) {
      std::vector<double> dx(4, 0.0);
      dx[x] = 1.0;
      q[x] = semigroup_apply(walk, dx, t);
    }
    for (std::uint64_t s0 = 0; s0 < 16; ++s0) {
      std::vector<double> delta(16, 0.0);
      delta[s0] = 1.0;
      const auto law = semigroup_apply(ssep, delta, t);
      for (std::size_t x = 0; x < 4; ++x) {
        double lhs = 0, rhs = 0;
        for (std::size_t s = 0; s < 16; ++s)
          if ((s >> x) & 1) lhs += law[s];
        for (std::size_t y = 0; y < 4; ++y) rhs += q[x][y] * static_cast<double>((s0 >> y) & 1);
        worst = std::max(worst, std::fabs(lhs - rhs));
      }
    }
  }
  return {worst < kDualityTol, "16 initial states, t in {0.3,1}: max gap " + fmt("%.2e", worst) + " (tol 1e-8)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome a10_determinism(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli path given"};
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "ssep_acceptance_a10";
  fs::remove_all(root);
  const std::string common = " -s run.t=10,40 -s run.reps=400 -s run.seed=" + std::to_string(ctx.seed);
  std::vector<std::string> files;
  int idx = 0;
  for (const char* workers : {"1", "1", "8"}) {
    const auto dir = root / std::to_string(idx++);
    const std::string cmd = ctx.cli + " simulate" + common + " -s run.workers=" + workers +
                            " -s run.output_dir=" + dir.string() + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "simulate failed: " + cmd};
    files.push_back(slurp(dir / "xi.csv"));
  }
  const bool same_run = files[0] == files[1];
  const bool same_workers = files[0] == files[2];
  return {same_run && same_workers && !files[0].empty(),
          std::string("repeat run ") + (same_run ? "identical" : "differs") + ", 1 vs 8 workers " +
              (same_workers ? "identical" : "differs") + " (" + std::to_string(files[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.workers = std::max(1U, std::thread::hardware_concurrency());
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else if (a == "--cli" && i + 1 < argc) {
      ctx.cli = argv[++i];
    } else if (a == "--workers" && i + 1 < argc) {
      ctx.workers = static_cast<unsigned>(std::stoul(argv[++i]));
    } else if (a == "--seed" && i + 1 < argc) {
      ctx.seed = std::stoull(argv[++i]);
    } else {
      std::cerr << "usage: ssep_acceptance [--only A<n>] [--cli path] [--workers n] [--seed s]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria{
      {"A1", a1_generator_identity}, {"A2", a2_decomposition}, {"A3", a3_sigma},  {"A4", a4_clt},
      {"A5", a5_martingales},        {"A6", a6_truncation},    {"A7", a7_heat},   {"A8", a8_mdp},
      {"A9", a9_duality},            {"A10", a10_determinism},
  };
  bool all = true, ran = false;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && only != name) continue;
    ran = true;
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << "  " << o.detail << std::endl;
    all = all && o.pass;
  }
  if (!ran) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all ? 0 : 1;
}
