#include "ssep/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ssep/errors.hpp"
#include "ssep/tree.hpp"

namespace ssep {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ValidationError(field + ": " + why);
}

double to_double(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) bad(field, "expected a finite number, got '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    bad(field, "expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) bad(field, "expected an integer, got '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    bad(field, "expected an integer, got '" + v + "'");
  }
}

std::vector<double> to_doubles(const std::string& field, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v)) out.push_back(to_double(field, s));
  return out;
}

bool to_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(field, "expected true or false, got '" + v + "'");
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
    out += (i ? "," : "");
    out += buf;
  }
  return out;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto positive_size = [&](std::size_t& out) {
    const auto x = to_int(key, v);
    if (x < 1) bad(key, "must be >= 1");
    out = static_cast<std::size_t>(x);
  };
  if (key == "model.degree") {
    const auto d = to_int(key, v);
    if (d < 2 || d > 255) bad(key, "must be an integer in [2, 255]");
    c.degree = static_cast<int>(d);
  } else if (key == "model.density") {
    c.density = to_double(key, v);
    if (!(c.density > 0 && c.density < 1)) bad(key, "must lie in (0, 1)");
  } else if (key == "model.radius") {
    if (v == "auto") {
      c.radius.reset();
    } else {
      const auto r = to_int(key, v);
      if (r < 1) bad(key, "must be 'auto' or an integer >= 1");
      c.radius = static_cast<int>(r);
    }
  } else if (key == "model.safety") {
    c.safety = to_double(key, v);
    if (c.safety < 0) bad(key, "must be >= 0");
  } else if (key == "model.ball_cap") {
    positive_size(c.ball_cap);
  } else if (key == "model.ssep_cap") {
    positive_size(c.ssep_cap);
  } else if (key == "model.tuple_cap") {
    positive_size(c.tuple_cap);
  } else if (key == "function.kind") {
    if (v != "occupation" && v != "product" && v != "table" && v != "file") {
      bad(key, "must be one of occupation, product, table, file");
    }
    c.kind = v;
  } else if (key == "function.sites") {
    c.sites = v;
  } else if (key == "function.table") {
    c.table = to_doubles(key, v);
  } else if (key == "function.file") {
    c.file = v;
  } else if (key == "function.center") {
    c.center = to_bool(key, v);
  } else if (key == "run.t") {
    c.t_grid = to_doubles(key, v);
    if (c.t_grid.empty()) bad(key, "needs at least one time");
    for (double t : c.t_grid) {
      if (!(t > 0)) bad(key, "times must be > 0");
    }
  } else if (key == "run.N") {
    c.N = to_double(key, v);
    if (!(c.N > 0)) bad(key, "must be > 0");
  } else if (key == "run.clt_t") {
    c.clt_t = to_double(key, v);
    if (!(c.clt_t > 0)) bad(key, "must be > 0");
  } else if (key == "run.gamma") {
    c.gamma = to_double(key, v);
    if (!(c.gamma > 0.5 && c.gamma < 1)) bad(key, "must lie in (0.5, 1)");
  } else if (key == "run.lambda") {
    if (v == "auto") {
      c.lambda.reset();
    } else {
      c.lambda = to_double(key, v);
      if (!(*c.lambda > 0)) bad(key, "must be 'auto' or > 0");
    }
  } else if (key == "run.sigma2") {
    if (v == "auto") {
      c.sigma2.reset();
    } else {
      c.sigma2 = to_double(key, v);
      if (!(*c.sigma2 > 0)) bad(key, "must be 'auto' or > 0");
    }
  } else if (key == "run.reps") {
    positive_size(c.reps);
  } else if (key == "run.seed") {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(v, &used, 0);
      if (used != v.size()) bad(key, "expected an unsigned integer");
    } catch (const std::logic_error&) {
      bad(key, "expected an unsigned integer, got '" + v + "'");
    }
  } else if (key == "run.workers") {
    const auto w = to_int(key, v);
    if (w < 1 || w > 1024) bad(key, "must be in [1, 1024]");
    c.workers = static_cast<unsigned>(w);
  } else if (key == "run.output_dir") {
    if (v.empty()) bad(key, "must not be empty");
    c.output_dir = v;
  } else if (key == "run.u_grid") {
    c.u_grid = to_doubles(key, v);
    if (c.u_grid.empty()) bad(key, "needs at least one point");
  } else if (key == "run.duality_tolerance") {
    c.duality_tolerance = to_double(key, v);
    if (!(c.duality_tolerance > 0)) bad(key, "must be > 0");
  } else if (key == "run.duality_reps") {
    positive_size(c.duality_reps);
    if (c.duality_reps < 2) bad(key, "must be >= 2");
  } else if (key == "run.heat_u") {
    c.heat_u = to_doubles(key, v);
    for (double u : c.heat_u) {
      if (!(u > 0)) bad(key, "times must be > 0");
    }
  } else if (key == "run.heat_degrees") {
    c.heat_degrees.clear();
    for (const auto& s : split(v)) {
      const auto d = to_int(key, s);
      if (d < 2 || d > 255) bad(key, "degrees must lie in [2, 255]");
      c.heat_degrees.push_back(static_cast<int>(d));
    }
  } else if (key == "run.heat_reps") {
    positive_size(c.heat_reps);
  } else if (key == "run.decompose_radius") {
    const auto r = to_int(key, v);
    if (r < 1) bad(key, "must be >= 1");
    c.decompose_radius = static_cast<int>(r);
  } else if (key == "run.decompose_t") {
    c.decompose_t = to_double(key, v);
    if (!(c.decompose_t > 0)) bad(key, "must be > 0");
  } else if (key == "run.decompose_paths") {
    positive_size(c.decompose_paths);
  } else {
    bad(key, "unknown setting");
  }
}

}  // namespace

LocalFunction ExperimentConfig::function() const {
  std::vector<VertexAddr> parsed;
  try {
    for (const auto& s : split(sites)) parsed.push_back(VertexAddr::parse(s == "root" ? "" : s, degree));
  } catch (const ValidationError& e) {
    bad("function.sites", e.what());
  }
  LocalFunction f = [&]() -> LocalFunction {
    if (kind == "occupation") {
      if (parsed.size() > 1) throw ValidationError("function.sites: occupation takes one site");
      return occupation_function(parsed.empty() ? VertexAddr::root() : parsed[0], density);
    }
    if (kind == "product") {
      if (parsed.size() != 2) throw ValidationError("function.sites: product takes two sites");
      return product_function(parsed[0], parsed[1], density);
    }
    if (kind == "table") {
      if (parsed.empty()) parsed.push_back(VertexAddr::root());
      try {
        return LocalFunction(parsed, table);
      } catch (const ValidationError& e) {
        bad("function.table", e.what());
      }
    }
    std::ifstream in(file);
    if (!in) throw ValidationError("function.file: cannot open '" + file + "'");
    try {
      return LocalFunction::read(in, degree);
    } catch (const ValidationError& e) {
      bad("function.file", e.what());
    }
  }();
  return center ? ssep::center(f, density) : f;
}

double ExperimentConfig::support_radius() const {
  return static_cast<double>(function().support_radius());
}

int ExperimentConfig::radius_for(double horizon) const {
  if (radius) return *radius;
  return truncation_radius(degree, support_radius(), horizon, safety);
}

void ExperimentConfig::write(std::ostream& out) const {
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << "[model]\n";
  out << "degree = " << degree << '\n';
  out << "density = " << num(density) << '\n';
  out << "radius = " << (radius ? std::to_string(*radius) : "auto") << '\n';
  out << "safety = " << num(safety) << '\n';
  out << "ball_cap = " << ball_cap << '\n';
  out << "ssep_cap = " << ssep_cap << '\n';
  out << "tuple_cap = " << tuple_cap << '\n';
  out << "\n[function]\n";
  out << "kind = " << kind << '\n';
  out << "sites = " << sites << '\n';
  out << "table = " << join(table) << '\n';
  out << "file = " << file << '\n';
  out << "center = " << (center ? "true" : "false") << '\n';
  out << "\n[run]\n";
  out << "t = " << join(t_grid) << '\n';
  out << "N = " << num(N) << '\n';
  out << "clt_t = " << num(clt_t) << '\n';
  out << "gamma = " << num(gamma) << '\n';
  out << "lambda = " << (lambda ? num(*lambda) : "auto") << '\n';
  out << "sigma2 = " << (sigma2 ? num(*sigma2) : "auto") << '\n';
  out << "reps = " << reps << '\n';
  out << "seed = " << seed << '\n';
  out << "workers = " << workers << '\n';
  out << "output_dir = " << output_dir << '\n';
  out << "u_grid = " << join(u_grid) << '\n';
  out << "duality_tolerance = " << num(duality_tolerance) << '\n';
  out << "duality_reps = " << duality_reps << '\n';
  out << "heat_u = " << join(heat_u) << '\n';
  out << "heat_degrees = ";
  for (std::size_t i = 0; i < heat_degrees.size(); ++i) out << (i ? "," : "") << heat_degrees[i];
  out << '\n';
  out << "heat_reps = " << heat_reps << '\n';
  out << "decompose_radius = " << decompose_radius << '\n';
  out << "decompose_t = " << num(decompose_t) << '\n';
  out << "decompose_paths = " << decompose_paths << '\n';
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig c;
  if (!path.empty()) {
    pt::ptree tree;
    try {
      pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ValidationError("config '" + path + "': " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty()) {
        throw ValidationError("config '" + path + "': key '" + section + "' must sit inside a section");
      }
      for (const auto& [key, value] : body) apply(c, section + "." + key, value.data());
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + o + "': expected section.key=value");
    apply(c, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  if (const char* dir = std::getenv("SSEP_OUTPUT_DIR"); dir && *dir) apply(c, "run.output_dir", dir);
  if (const char* w = std::getenv("SSEP_WORKERS"); w && *w) apply(c, "run.workers", w);
  c.function();  // surfaces site and table errors now
  return c;
}

}  // namespace ssep
