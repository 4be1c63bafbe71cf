#include "ssep/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "ssep/errors.hpp"
#include "ssep/experiments.hpp"
#include "ssep/martingale.hpp"
#include "ssep/oracle.hpp"
#include "ssep/parallel.hpp"
#include "ssep/statistics.hpp"
#include "ssep/stirring.hpp"

namespace ssep {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Outputs {
  fs::path dir;
  Outputs(const ExperimentConfig& cfg, const std::string& sub) : dir(cfg.output_dir) {
    fs::create_directories(dir);
    std::ofstream ini(dir / (sub + ".resolved.ini"));
    cfg.write(ini);
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  }
};

class CheckList {
 public:
  explicit CheckList(std::ostream& out) : out_(out) {}
  void record(const std::string& name, bool ok, const std::string& detail) {
    out_ << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    all_ &= ok;
  }
  int exit_code() const { return all_ ? kExitOk : kExitCheckFailed; }

 private:
  std::ostream& out_;
  bool all_ = true;
};

bool is_occupation(const ExperimentConfig& cfg) { return cfg.kind == "occupation"; }

/// sigma^2 for clt/mdp: configured, exact for occupation time, else the duality estimate.
double resolve_sigma2(const ExperimentConfig& cfg, const LocalFunction& f, std::ostream& report) {
  if (cfg.sigma2) return *cfg.sigma2;
  if (is_occupation(cfg)) return sigma_occupation_exact(cfg.degree, cfg.density);
  DualityOptions o;
  o.degree = cfg.degree;
  o.p = cfg.density;
  o.tolerance = cfg.duality_tolerance;
  o.cutoff = duality_cutoff(f, cfg.degree, cfg.duality_tolerance);
  o.reps = cfg.duality_reps;
  o.seed = cfg.seed;
  const auto e = estimate_sigma_duality(f, o);
  report << "sigma^2 from duality estimate: " << fmt("%.6g", e.value) << " +- " << fmt("%.2g", e.std_error) << '\n';
  return e.value;
}

XiJob xi_job(const ExperimentConfig& cfg, std::vector<double> times, std::uint64_t seed) {
  XiJob job;
  job.degree = cfg.degree;
  job.density = cfg.density;
  job.radius = cfg.radius_for(times.back());
  job.times = std::move(times);
  job.reps = cfg.reps;
  job.seed = seed;
  job.workers = cfg.workers;
  return job;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& report) {
  const Outputs out(cfg, "simulate");
  const auto f = cfg.function();
  auto times = cfg.t_grid;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto job = xi_job(cfg, times, cfg.seed);
  const auto batch = run_xi(job, f);
  std::vector<XiRecord> records;
  for (std::size_t i = 0; i < batch.xi.size(); ++i) {
    for (std::size_t k = 0; k < times.size(); ++k) records.push_back({i, times[k], batch.xi[i][k], cfg.seed});
  }
  auto csv = out.open("xi.csv");
  write_xi_csv(csv, records);
  report << "simulate: " << job.reps << " paths, radius " << job.radius << ", " << records.size()
         << " records, boundary visits " << batch.boundary_visits << '\n';
  return kExitOk;
}

int cmd_sigma(const ExperimentConfig& cfg, std::ostream& report) {
  const auto f = cfg.function();
  require_centered(f, cfg.density);
  const Outputs out(cfg, "sigma");
  const double t = *std::max_element(cfg.t_grid.begin(), cfg.t_grid.end());
  const auto job = xi_job(cfg, {t}, cfg.seed);
  const auto batch = run_xi(job, f);
  const auto emp = estimate_sigma_empirical(batch.records_at(0, job));

  DualityOptions o;
  o.degree = cfg.degree;
  o.p = cfg.density;
  o.tolerance = cfg.duality_tolerance;
  o.cutoff = duality_cutoff(f, cfg.degree, cfg.duality_tolerance);
  o.reps = cfg.duality_reps;
  o.seed = mix64(cfg.seed ^ 0xd1a1);
  const auto dual = estimate_sigma_duality(f, o);

  auto csv = out.open("sigma.csv");
  write_estimate_header(csv);
  const std::string params = "t=" + fmt("%g", t) + ";radius=" + std::to_string(job.radius) +
                             ";cutoff=" + fmt("%.6g", o.cutoff);
  write_estimate_row(csv, emp, params);
  write_estimate_row(csv, dual, params);
  report << "sigma^2 empirical (t=" << t << ", R=" << job.radius << "): " << fmt("%.6f", emp.value) << " +- "
         << fmt("%.6f", emp.std_error) << '\n';
  report << "sigma^2 duality   (U=" << fmt("%.2f", o.cutoff) << "): " << fmt("%.6f", dual.value) << " +- "
         << fmt("%.6f", dual.std_error) << '\n';
  if (is_occupation(cfg)) {
    const EstimateCI exact{sigma_occupation_exact(cfg.degree, cfg.density), 0.0, 0, "oracle"};
    write_estimate_row(csv, exact, "closed_form");
    report << "sigma^2 oracle: " << fmt("%.6f", exact.value) << '\n';
  }
  report << "boundary visits: " << batch.boundary_visits << '\n';
  return kExitOk;
}

int cmd_clt(const ExperimentConfig& cfg, std::ostream& report) {
  const auto f = cfg.function();
  require_centered(f, cfg.density);
  const Outputs out(cfg, "clt");
  const double sigma2 = resolve_sigma2(cfg, f, report);
  const double horizon = cfg.clt_t * cfg.N;
  const auto job = xi_job(cfg, {horizon}, cfg.seed);
  auto samples = run_xi(job, f).column(0);
  for (auto& x : samples) x /= std::sqrt(cfg.N);
  const auto ks = clt_test(samples, std::sqrt(sigma2), cfg.clt_t);
  auto csv = out.open("clt.csv");
  csv << "# ssep-clt v1\nN,t,sigma2,n,ks_statistic,p_value\n";
  csv << fmt("%.17g", cfg.N) << ',' << fmt("%.17g", cfg.clt_t) << ',' << fmt("%.17g", sigma2) << ',' << ks.n << ','
      << fmt("%.17g", ks.statistic) << ',' << fmt("%.17g", ks.p_value) << '\n';
  report << "KS statistic " << fmt("%.5f", ks.statistic) << ", p-value " << fmt("%.4f", ks.p_value) << " (n=" << ks.n
         << ", N=" << cfg.N << ", t=" << cfg.clt_t << ")\n";
  return kExitOk;
}

int cmd_mdp(const ExperimentConfig& cfg, std::ostream& report) {
  const auto f = cfg.function();
  require_centered(f, cfg.density);
  const Outputs out(cfg, "mdp");
  const double sigma2 = resolve_sigma2(cfg, f, report);
  auto csv = out.open("rates.csv");
  csv << "# ssep-rates v1\nt,a_t,u,hits,samples,empirical,theoretical,gap\n";
  std::map<double, std::vector<double>> gaps;  // u -> gap per t
  for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
    const double t = cfg.t_grid[k];
    const double a_t = std::pow(t, cfg.gamma);
    const auto job = xi_job(cfg, {t}, mix64(cfg.seed ^ k));
    const auto xi = run_xi(job, f).column(0);
    std::vector<std::string> warnings;
    const auto points = tail_rate(xi, t, a_t, cfg.u_grid, sigma2, &warnings);
    for (const auto& w : warnings) report << "warning (t=" << t << "): " << w << '\n';
    for (const auto& p : points) {
      csv << fmt("%.17g", t) << ',' << fmt("%.17g", a_t) << ',' << fmt("%.17g", p.u) << ',' << p.hits << ','
          << p.samples << ',' << fmt("%.17g", p.empirical) << ',' << fmt("%.17g", p.theoretical) << ','
          << fmt("%.17g", p.gap()) << '\n';
      report << "t=" << t << " u=" << p.u << " hits=" << p.hits << "/" << p.samples << " empirical "
             << fmt("%.4f", p.empirical) << " theoretical " << fmt("%.4f", p.theoretical) << " gap "
             << fmt("%.4f", p.gap()) << '\n';
      gaps[p.u].push_back(p.gap());
    }
  }
  for (const auto& [u, g] : gaps) {
    if (g.size() >= 2) {
      report << "u=" << u << ": gap " << (g.back() <= g.front() ? "does not increase" : "increases") << " over the t grid\n";
    }
  }
  return kExitOk;
}

int cmd_decompose(const ExperimentConfig& cfg, std::ostream& report) {
  const auto f = cfg.function();
  const Outputs out(cfg, "decompose");
  auto ball = std::make_shared<const Ball>(build_ball(cfg.degree, cfg.decompose_radius, cfg.ball_cap));
  const double t = cfg.decompose_t;
  const double lambda = cfg.lambda.value_or(1.0);
  const ExactG g(ball, f, lambda, cfg.tuple_cap);
  const auto records = parallel_map(
      cfg.decompose_paths, cfg.workers, [] { return 0; },
      [&](int&, std::size_t i) {
        auto [eta0, log] = sample_stationary_path(ball, cfg.density, t, RngStream(cfg.seed, i));
        return decompose_path(eta0, log, t, g, i);
      });
  auto csv = out.open("decomposition.csv");
  write_decomposition_csv(csv, records);
  double worst = 0.0;
  std::vector<double> m;
  for (const auto& r : records) {
    worst = std::max(worst, std::fabs(r.residual));
    m.push_back(r.M);
  }
  report << "decompose: " << records.size() << " paths on ball(" << cfg.degree << "," << cfg.decompose_radius
         << "), t=" << t << ", lambda=" << lambda << '\n';
  if (m.size() >= 2) {
    report << "mean M_t " << fmt("%.5f", mean(m)) << " +- "
           << fmt("%.5f", std::sqrt(sample_variance(m) / static_cast<double>(m.size()))) << '\n';
  }
  CheckList checks(report);
  checks.record("decomposition residual", worst < 1e-8, "max |residual| = " + fmt("%.3e", worst));
  return checks.exit_code();
}

int cmd_heat(const ExperimentConfig& cfg, std::ostream& report) {
  const Outputs out(cfg, "heat");
  auto csv = out.open("heat.csv");
  csv << "# ssep-heat v1\ndegree,u,estimate,std_error,reps,bound,holds\n";
  CheckList checks(report);
  std::uint64_t stream = 0;
  for (int d : cfg.heat_degrees) {
    for (double u : cfg.heat_u) {
      RngStream rng(cfg.seed, stream++);
      const auto e = heat_kernel_mc(VertexAddr::root(), VertexAddr::root(), d, u, cfg.heat_reps, rng);
      const double bound = std::exp(-u * std::pow(std::sqrt(static_cast<double>(d)) - 1, 2));
      const bool ok = e.value <= bound + 3 * e.std_error;
      csv << d << ',' << fmt("%.17g", u) << ',' << fmt("%.17g", e.value) << ',' << fmt("%.17g", e.std_error) << ','
          << e.reps << ',' << fmt("%.17g", bound) << ',' << (ok ? 1 : 0) << '\n';
      checks.record("heat bound d=" + std::to_string(d) + " u=" + fmt("%g", u), ok,
                    "Q=" + fmt("%.5f", e.value) + " se=" + fmt("%.5f", e.std_error) + " bound=" + fmt("%.5f", bound));
    }
  }
  return checks.exit_code();
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& report) {
  const Outputs out(cfg, "verify");
  CheckList checks(report);
  auto star = std::make_shared<const Ball>(build_ball(2, 1));
  auto ball22 = std::make_shared<const Ball>(build_ball(2, 2));
  const double p = 0.5;
  const auto occ = occupation_function(VertexAddr::root(), p);
  const auto prod = product_function(VertexAddr::root(), VertexAddr({0}, 2), p);

  for (double lambda : {0.5, 1.0}) {
    const ExactG g(star, occ, lambda);
    const double r = verify_generator_identity_exhaustive(g, star);
    checks.record("generator identity ball(2,1) lambda=" + fmt("%g", lambda), r < 1e-10, "max residual " + fmt("%.2e", r));
  }
  {
    const ExactG g(ball22, prod, 0.5);
    std::vector<Configuration> sample;
    RngStream rng(cfg.seed, 0);
    for (int i = 0; i < 100; ++i) sample.push_back(sample_nu_p(ball22, p, rng));
    const double r = verify_generator_identity(g, sample);
    checks.record("generator identity ball(2,2) m=2", r < 1e-10, "max residual " + fmt("%.2e", r));
  }
  {
    const ExactG g(star, occ, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      auto [eta0, log] = sample_stationary_path(star, p, 5.0, RngStream(cfg.seed, 1000 + i));
      worst = std::max(worst, std::fabs(decompose_path(eta0, log, 5.0, g, i).residual));
    }
    checks.record("pathwise decomposition ball(2,1) t=5", worst < 1e-8, "max |residual| " + fmt("%.2e", worst));
  }
  {
    bool ok = true;
    for (std::size_t i = 0; i < 50 && ok; ++i) {
      auto [eta0, log] = sample_stationary_path(ball22, p, 3.0, RngStream(cfg.seed, 2000 + i));
      for (double t : {0.5, 1.7, 3.0}) {
        const auto eta_t = evolve(eta0, log, t);
        for (std::uint32_t x = 0; x < ball22->vertex_count(); ++x) {
          ok &= eta_t[x] == eta0[trace_dual(log, x, t, t)];
        }
      }
    }
    checks.record("pathwise duality ball(2,2)", ok, "evolve vs dual trace, 50 logs");
  }
  {
    double worst = 0.0;
    for (std::size_t m : {1, 2}) {
      std::vector<VertexAddr> src{VertexAddr::root(), VertexAddr({1}, 2)};
      src.resize(m);
      for (double lambda : {0.3, 1.0, 4.0}) {
        const auto table = exact_beta(ball22, StirringTuple(src), lambda);
        double s = 0.0;
        for (double b : table.values()) s += b;
        worst = std::max(worst, std::fabs(lambda * s - 1));
      }
    }
    checks.record("resolvent normalization", worst < 1e-10, "max |lambda sum beta - 1| " + fmt("%.2e", worst));
  }
  {
    const auto ssep = build_ssep_generator(*star);
    const auto walk = build_stirring_generator(*star, 1);
    double worst = 0.0;
    for (double t : {0.3, 1.0}) {
      // E[eta_t(x)] from the SSEP semigroup acting on f(eta) = eta(x)
      for (std::uint32_t x = 0; x < star->vertex_count(); ++x) {
        std::vector<double> fx(ssep.dim);
        for (std::size_t s = 0; s < ssep.dim; ++s) fx[s] = static_cast<double>((s >> x) & 1U);
        const auto lhs = semigroup_apply(ssep, fx, t);
        std::vector<double> delta(walk.dim, 0.0);
        delta[x] = 1.0;
        const auto q = semigroup_apply(walk, delta, t);  // q[y] = Q_t(x, y), symmetric generator
        for (std::size_t s = 0; s < ssep.dim; ++s) {
          double rhs = 0.0;
          for (std::uint32_t y = 0; y < star->vertex_count(); ++y) rhs += q[y] * static_cast<double>((s >> y) & 1U);
          worst = std::max(worst, std::fabs(lhs[s] - rhs));
        }
      }
    }
    checks.record("semigroup duality ball(2,1)", worst < 1e-8, "max gap " + fmt("%.2e", worst));
  }
  {
    auto ball3 = std::make_shared<const Ball>(build_ball(2, 3));
    LazyTree tree({2, 3, 5.0, p});
    bool ok = true;
    const double times[] = {5.0};
    for (std::size_t i = 0; i < 20; ++i) {
      tree.reset(RngStream(cfg.seed, 3000 + i));
      const double lazy = accumulate_xi(tree, occ, times)[0];
      auto [eta0, log] = materialize(tree, ball3);
      ok &= lazy == accumulate_xi(eta0, log, occ, 5.0).xi;
    }
    checks.record("lazy engine matches materialized engine", ok, "20 paths on ball(2,3), t=5");
  }
  return checks.exit_code();
}

const std::map<std::string, std::function<int(const ExperimentConfig&, std::ostream&)>>& table() {
  static const std::map<std::string, std::function<int(const ExperimentConfig&, std::ostream&)>> t{
      {"simulate", cmd_simulate}, {"sigma", cmd_sigma},   {"clt", cmd_clt},   {"mdp", cmd_mdp},
      {"decompose", cmd_decompose}, {"verify", cmd_verify}, {"heat", cmd_heat},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "sigma", "clt", "mdp", "decompose", "verify", "heat"};
  return names;
}

int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& report) {
  const auto it = table().find(subcommand);
  if (it == table().end()) throw ValidationError("unknown subcommand '" + subcommand + "'");
  return it->second(cfg, report);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CapExceeded*>(&e)) return kExitCapExceeded;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitInvalidConfig;
  return kExitCheckFailed;
}

}  // namespace ssep
