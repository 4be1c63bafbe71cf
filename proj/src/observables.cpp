#include "ssep/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "ssep/errors.hpp"

namespace ssep {

LocalFunction::LocalFunction(std::vector<VertexAddr> sites, std::vector<double> table)
    : sites_(std::move(sites)), table_(std::move(table)) {
  if (sites_.empty()) throw ValidationError("local function needs at least one site");
  if (sites_.size() > kMaxLocalSites) throw ValidationError("local function has too many sites");
  auto sorted = sites_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("local function sites must be distinct");
  }
  if (table_.size() != (std::size_t{1} << sites_.size())) {
    throw ValidationError("local function table needs 2^m = " +
                          std::to_string(std::size_t{1} << sites_.size()) + " entries, got " +
                          std::to_string(table_.size()));
  }
  for (double h : table_) {
    if (!std::isfinite(h)) throw ValidationError("local function values must be finite");
    sup_norm_ = std::max(sup_norm_, std::fabs(h));
  }
}

std::size_t LocalFunction::support_radius() const {
  std::size_t r = 0;
  for (const auto& s : sites_) r = std::max(r, s.depth());
  return r;
}

bool LocalFunction::is_zero() const { return sup_norm_ == 0.0; }

LocalFunction LocalFunction::combine(double a, const LocalFunction& f, double b, const LocalFunction& g) {
  if (f.sites_ != g.sites_) throw ValidationError("combine: site lists differ");
  std::vector<double> t(f.table_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = a * f.table_[i] + b * g.table_[i];
  return LocalFunction(f.sites_, std::move(t));
}

void LocalFunction::write(std::ostream& out) const {
  out << "sites: ";
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (i) out << ',';
    out << sites_[i].to_string();
  }
  out << '\n';
  char buf[64];
  for (std::size_t w = 0; w < table_.size(); ++w) {
    for (std::size_t i = 0; i < sites_.size(); ++i) out << ((w >> i) & 1U);
    std::snprintf(buf, sizeof buf, ",%.17g\n", table_[w]);
    out << buf;
  }
}

LocalFunction LocalFunction::read(std::istream& in, int degree) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("sites:", 0) != 0) {
    throw ValidationError("local function file: first line must start with 'sites:'");
  }
  std::string list = line.substr(6);
  if (!list.empty() && list.front() == ' ') list.erase(0, 1);
  std::vector<VertexAddr> sites;
  std::size_t pos = 0;
  while (true) {
    const auto comma = list.find(',', pos);
    sites.push_back(VertexAddr::parse(list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos),
                                      degree));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  const std::size_t m = sites.size();
  if (m > kMaxLocalSites) throw ValidationError("local function file: too many sites");
  std::vector<double> table(std::size_t{1} << m);
  std::vector<bool> seen(table.size(), false);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma != m) throw ValidationError("local function file: bad row '" + line + "'");
    std::uint32_t w = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (line[i] != '0' && line[i] != '1') throw ValidationError("local function file: bad bits '" + line + "'");
      w |= static_cast<std::uint32_t>(line[i] - '0') << i;
    }
    if (seen[w]) throw ValidationError("local function file: duplicate pattern '" + line.substr(0, m) + "'");
    seen[w] = true;
    try {
      table[w] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ValidationError("local function file: bad value in '" + line + "'");
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError("local function file: table is missing patterns");
  }
  return LocalFunction(std::move(sites), std::move(table));
}

double mean_under_nu_p(const LocalFunction& f, double p) {
  if (!(p > 0 && p < 1)) throw ValidationError("density p must lie in (0, 1)");
  double mean = 0.0;
  const auto m = f.m();
  for (std::uint32_t w = 0; w < f.table().size(); ++w) {
    const int ones = std::popcount(w);
    mean += f(w) * std::pow(p, ones) * std::pow(1 - p, static_cast<int>(m) - ones);
  }
  return mean;
}

LocalFunction center(const LocalFunction& f, double p) {
  const double mean = mean_under_nu_p(f, p);
  std::vector<double> t = f.table();
  for (auto& h : t) h -= mean;
  return LocalFunction(f.sites(), std::move(t));
}

bool is_centered(const LocalFunction& f, double p, double tol) {
  return std::fabs(mean_under_nu_p(f, p)) <= tol * std::max(1.0, f.sup_norm());
}

void require_centered(const LocalFunction& f, double p) {
  if (!is_centered(f, p)) {
    throw NotCentered("local function has mean " + std::to_string(mean_under_nu_p(f, p)) +
                      " under nu_p; center it first (center(F, p), or 'center = true' in the config)");
  }
}

LocalFunction occupation_function(const VertexAddr& x, double p) {
  if (!(p > 0 && p < 1)) throw ValidationError("density p must lie in (0, 1)");
  return LocalFunction({x}, {-p, 1 - p});
}

LocalFunction product_function(const VertexAddr& x, const VertexAddr& y, double p) {
  if (!(p > 0 && p < 1)) throw ValidationError("density p must lie in (0, 1)");
  return LocalFunction({x, y}, {-p * p, -p * p, -p * p, 1 - p * p});
}

std::uint32_t pattern_of(std::span<const std::uint32_t> site_index, const Configuration& eta) {
  std::uint32_t w = 0;
  for (std::size_t i = 0; i < site_index.size(); ++i) w |= std::uint32_t{eta[site_index[i]]} << i;
  return w;
}

double eval(const LocalFunction& f, const Configuration& eta) {
  std::uint32_t w = 0;
  for (std::size_t i = 0; i < f.m(); ++i) w |= std::uint32_t{eta.at(f.sites()[i])} << i;
  return f(w);
}

XiRecord accumulate_xi(const Configuration& eta0, const EventLog& log, const LocalFunction& f, double t) {
  if (!(t >= 0 && t <= log.horizon())) throw ValidationError("accumulate_xi: t outside [0, horizon]");
  const Ball& ball = log.ball();
  std::vector<std::uint32_t> sites;
  for (const auto& s : f.sites()) sites.push_back(ball.index_of(s));
  auto slot = [&](std::uint32_t v) -> int {
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (sites[i] == v) return static_cast<int>(i);
    }
    return -1;
  };

  const auto limit = log.count_until(t);
  std::vector<std::uint32_t> relevant;
  for (auto v : sites) {
    for (auto idx : log.touching(v)) {
      if (idx >= limit) break;
      relevant.push_back(idx);
    }
  }
  std::sort(relevant.begin(), relevant.end());
  relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());

  std::uint32_t w = pattern_of(sites, eta0);
  double value = f(w);
  double xi = 0.0;
  double last = 0.0;
  const auto events = log.events();
  for (auto idx : relevant) {
    const auto& ev = events[idx];
    xi += value * (ev.time - last);
    last = ev.time;
    const auto a = ball.edge_parent(ev.edge);
    const auto b = ball.edge_child(ev.edge);
    const int sa = slot(a);
    const int sb = slot(b);
    const auto bit = [&](int s) { return (w >> s) & 1U; };
    if (sa >= 0 && sb >= 0) {
      const auto va = bit(sa), vb = bit(sb);
      w = (w & ~((1U << sa) | (1U << sb))) | (vb << sa) | (va << sb);
    } else {
      const int s = sa >= 0 ? sa : sb;
      const auto other = sa >= 0 ? b : a;
      const std::uint32_t incoming = eta0[trace_to_origin(log, other, idx)];
      w = (w & ~(1U << s)) | (incoming << s);
    }
    value = f(w);
  }
  xi += value * (t - last);
  return XiRecord{log.stream_id(), t, xi, log.seed()};
}

std::vector<double> accumulate_xi(LazyTree& tree, const LocalFunction& f, std::span<const double> times) {
  if (times.empty()) return {};
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0 ||
      times.back() > tree.params().horizon) {
    throw ValidationError("accumulate_xi: times must be ascending within [0, horizon]");
  }
  std::vector<LazyTree::Node> sites;
  for (const auto& s : f.sites()) sites.push_back(tree.locate(s));
  auto slot = [&](LazyTree::Node v) -> int {
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (sites[i] == v) return static_cast<int>(i);
    }
    return -1;
  };
  std::uint32_t w = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) w |= std::uint32_t{tree.initial_occupancy(sites[i])} << i;

  thread_local std::vector<LazyTree::Ring> rings;
  tree.rings_touching(sites, times.back(), rings);

  std::vector<double> out;
  out.reserve(times.size());
  std::size_t next_time = 0;
  double value = f(w);
  double xi = 0.0;
  double last = 0.0;
  auto flush_until = [&](double t) {
    while (next_time < times.size() && times[next_time] <= t) {
      out.push_back(xi + value * (times[next_time] - last));
      ++next_time;
    }
  };
  for (const auto& ring : rings) {
    flush_until(ring.time);
    xi += value * (ring.time - last);
    last = ring.time;
    const int sa = slot(ring.a);
    const int sb = slot(ring.b);
    if (sb >= 0) {
      const auto va = (w >> sa) & 1U, vb = (w >> sb) & 1U;
      w = (w & ~((1U << sa) | (1U << sb))) | (vb << sa) | (va << sb);
    } else {
      const std::uint32_t incoming = tree.initial_occupancy(tree.trace_to_origin(ring.b, ring.time)) ? 1 : 0;
      w = (w & ~(1U << sa)) | (incoming << sa);
    }
    value = f(w);
  }
  flush_until(times.back() + 1.0);
  return out;
}

void write_xi_csv(std::ostream& out, std::span<const XiRecord> records) {
  out << "# ssep-xi v1\n";
  out << "path_id,t,xi,seed\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%llu\n", static_cast<unsigned long long>(r.path_id), r.t,
                  r.xi, static_cast<unsigned long long>(r.seed));
    out << buf;
  }
}

}  // namespace ssep
