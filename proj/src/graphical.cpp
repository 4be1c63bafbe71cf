#include "ssep/graphical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ssep/errors.hpp"

namespace ssep {

Configuration::Configuration(std::shared_ptr<const Ball> ball, std::vector<std::uint8_t> occupancy)
    : ball_(std::move(ball)), occ_(std::move(occupancy)) {
  if (!ball_) throw ValidationError("configuration needs a ball");
  if (occ_.size() != ball_->vertex_count()) {
    throw ValidationError("configuration length " + std::to_string(occ_.size()) + " != |V| " +
                          std::to_string(ball_->vertex_count()));
  }
  for (auto b : occ_) {
    if (b > 1) throw ValidationError("occupancy values must be 0 or 1");
  }
}

Configuration Configuration::vacant(std::shared_ptr<const Ball> ball) {
  const auto n = ball->vertex_count();
  return Configuration(std::move(ball), std::vector<std::uint8_t>(n, 0));
}

Configuration Configuration::from_bits(std::shared_ptr<const Ball> ball, std::uint64_t bits) {
  const auto n = ball->vertex_count();
  if (n > 64) throw ValidationError("from_bits needs at most 64 vertices");
  std::vector<std::uint8_t> occ(n);
  for (std::size_t i = 0; i < n; ++i) occ[i] = static_cast<std::uint8_t>((bits >> i) & 1U);
  return Configuration(std::move(ball), std::move(occ));
}

std::size_t Configuration::particle_count() const {
  return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

std::uint64_t Configuration::bits() const {
  if (occ_.size() > 64) throw ValidationError("bits() needs at most 64 vertices");
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < occ_.size(); ++i) b |= std::uint64_t{occ_[i]} << i;
  return b;
}

EventStream::EventStream(std::shared_ptr<const Ball> ball, double horizon, RngStream rng)
    : ball_(std::move(ball)), horizon_(horizon), rng_(rng) {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
}

std::optional<PoissonEvent> EventStream::next() {
  if (lookahead_) return std::exchange(lookahead_, std::nullopt);
  if (exhausted_) return std::nullopt;
  const auto edges = static_cast<double>(ball_->edge_count());
  double t = clock_;
  // A gap that rounds to zero would create a tie; draw it again.
  do {
    t = clock_ + rng_.exponential(edges);
  } while (t <= clock_);
  if (t > horizon_) {
    exhausted_ = true;
    return std::nullopt;
  }
  clock_ = t;
  return PoissonEvent{t, static_cast<std::uint32_t>(rng_.below(ball_->edge_count()))};
}

void EventStream::fill_until(double until, std::vector<PoissonEvent>& out) {
  while (auto e = next()) {
    if (e->time > until) {
      lookahead_ = e;
      return;
    }
    out.push_back(*e);
  }
}

EventLog::EventLog(std::shared_ptr<const Ball> ball, double horizon, std::vector<PoissonEvent> events,
                   std::uint64_t seed, std::uint64_t stream_id)
    : ball_(std::move(ball)), horizon_(horizon), events_(std::move(events)), seed_(seed),
      stream_id_(stream_id) {
  if (!ball_) throw ValidationError("event log needs a ball");
  if (!(horizon_ >= 0) || !std::isfinite(horizon_)) throw ValidationError("bad horizon");
  double prev = 0.0;
  for (const auto& e : events_) {
    if (!(e.time > prev) || e.time > horizon_) {
      throw ValidationError("event times must be strictly increasing within (0, horizon]");
    }
    if (e.edge >= ball_->edge_count()) throw ValidationError("event edge index out of range");
    prev = e.time;
  }
  const auto n = ball_->vertex_count();
  touch_offsets_.assign(n + 1, 0);
  for (const auto& e : events_) {
    ++touch_offsets_[ball_->edge_parent(e.edge) + 1];
    ++touch_offsets_[ball_->edge_child(e.edge) + 1];
  }
  for (std::size_t v = 0; v < n; ++v) touch_offsets_[v + 1] += touch_offsets_[v];
  touch_events_.resize(touch_offsets_[n]);
  std::vector<std::uint32_t> fill(touch_offsets_.begin(), touch_offsets_.end() - 1);
  for (std::uint32_t i = 0; i < events_.size(); ++i) {
    touch_events_[fill[ball_->edge_parent(events_[i].edge)]++] = i;
    touch_events_[fill[ball_->edge_child(events_[i].edge)]++] = i;
  }
}

EventLog EventLog::sample(std::shared_ptr<const Ball> ball, double horizon, RngStream rng) {
  const auto seed = rng.seed();
  const auto stream = rng.stream_id();
  EventStream gen(ball, horizon, rng);
  std::vector<PoissonEvent> events;
  events.reserve(static_cast<std::size_t>(ball->edge_count() * horizon * 1.1) + 16);
  gen.fill_until(horizon, events);
  return EventLog(std::move(ball), horizon, std::move(events), seed, stream);
}

std::span<const std::uint32_t> EventLog::touching(std::size_t v) const {
  return std::span<const std::uint32_t>(touch_events_).subspan(touch_offsets_[v],
                                                              touch_offsets_[v + 1] - touch_offsets_[v]);
}

std::size_t EventLog::count_until(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(events_.begin(), events_.end(), t,
                       [](double value, const PoissonEvent& e) { return value < e.time; }) -
      events_.begin());
}

EventLog EventLog::tail_from(double s) const {
  if (!(s >= 0 && s <= horizon_)) throw ValidationError("tail_from: s outside [0, horizon]");
  std::vector<PoissonEvent> rest;
  for (std::size_t i = count_until(s); i < events_.size(); ++i) {
    rest.push_back({events_[i].time - s, events_[i].edge});
  }
  // Shifting can collapse two distinct times onto one double; keep strictness.
  std::vector<PoissonEvent> clean;
  for (const auto& e : rest) {
    if (e.time > 0 && (clean.empty() || e.time > clean.back().time)) clean.push_back(e);
  }
  return EventLog(ball_, horizon_ - s, std::move(clean), seed_, stream_id_);
}

void EventLog::write_csv(std::ostream& out) const {
  out << "# ssep-eventlog v1 degree=" << ball_->degree() << " radius=" << ball_->radius()
      << " horizon=";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", horizon_);
  out << buf << " seed=" << seed_ << " stream=" << stream_id_ << "\n";
  out << "time,edge_parent,edge_letter\n";
  for (const auto& e : events_) {
    const auto& edge = ball_->edges()[e.edge];
    std::snprintf(buf, sizeof buf, "%.17g", e.time);
    out << buf << ',' << edge.parent.to_string() << ',' << int{edge.letter} << '\n';
  }
}

EventLog EventLog::read_csv(std::istream& in, std::shared_ptr<const Ball> ball) {
  std::string line;
  double horizon = -1;
  std::uint64_t seed = 0, stream = 0;
  if (!std::getline(in, line) || line.rfind("# ssep-eventlog v1", 0) != 0) {
    throw ValidationError("event log CSV: missing '# ssep-eventlog v1' header");
  }
  {
    std::istringstream hdr(line.substr(18));
    std::string kv;
    while (hdr >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const auto key = kv.substr(0, eq);
      const auto val = kv.substr(eq + 1);
      if (key == "horizon") horizon = std::stod(val);
      if (key == "seed") seed = std::stoull(val);
      if (key == "stream") stream = std::stoull(val);
      if (key == "degree" && std::stoi(val) != ball->degree()) {
        throw ValidationError("event log CSV: degree does not match ball");
      }
    }
  }
  if (!std::getline(in, line) || line != "time,edge_parent,edge_letter") {
    throw ValidationError("event log CSV: bad column header");
  }
  std::vector<PoissonEvent> events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw ValidationError("event log CSV: malformed row '" + line + "'");
    }
    const double t = std::stod(line.substr(0, c1));
    const auto parent = VertexAddr::parse(line.substr(c1 + 1, c2 - c1 - 1), ball->degree());
    const int letter = std::stoi(line.substr(c2 + 1));
    const auto edge = ball->edge_index(EdgeAddr{parent, static_cast<std::uint8_t>(letter)});
    events.push_back({t, edge});
  }
  if (horizon < 0) horizon = events.empty() ? 0.0 : events.back().time;
  return EventLog(std::move(ball), horizon, std::move(events), seed, stream);
}

Configuration evolve(const Configuration& eta0, const EventLog& log, double t) {
  if (!(t >= 0 && t <= log.horizon())) throw ValidationError("evolve: t outside [0, horizon]");
  if (&eta0.ball() != &log.ball()) throw ValidationError("evolve: configuration and log use different balls");
  Configuration eta = eta0;
  const auto events = log.events();
  const auto n = log.count_until(t);
  for (std::size_t i = 0; i < n; ++i) eta.swap_edge(events[i].edge);
  return eta;
}

namespace {

// Event indices are time-ordered, so index bounds stand in for time bounds:
// follows events with index in [lower, limit) backwards.
std::uint32_t trace_indices(const EventLog& log, std::uint32_t x, std::size_t lower, std::size_t limit) {
  const auto events = log.events();
  std::uint32_t pos = x;
  while (true) {
    const auto touch = log.touching(pos);
    const auto it = std::lower_bound(touch.begin(), touch.end(), static_cast<std::uint32_t>(limit));
    if (it == touch.begin()) break;
    const std::uint32_t idx = *(it - 1);
    if (idx < lower) break;
    pos = log.ball().other_end(events[idx].edge, pos);
    limit = idx;
  }
  return pos;
}

}  // namespace

std::uint32_t trace_dual(const EventLog& log, std::uint32_t x, double t, double s) {
  if (!(s >= 0 && s <= t && t <= log.horizon())) {
    throw ValidationError("trace_dual: need 0 <= s <= t <= horizon");
  }
  if (x >= log.ball().vertex_count()) throw ValidationError("trace_dual: vertex outside ball");
  return trace_indices(log, x, log.count_until(t - s), log.count_until(t));
}

std::uint32_t trace_to_origin(const EventLog& log, std::uint32_t v, std::size_t event_limit) {
  return trace_indices(log, v, 0, event_limit);
}

VertexAddr trace_dual(const EventLog& log, const VertexAddr& x, double t, double s) {
  return log.ball().vertex(trace_dual(log, log.ball().index_of(x), t, s));
}

std::vector<std::uint32_t> trace_dual_multi(const EventLog& log, std::span<const std::uint32_t> xs,
                                            double t, double s) {
  std::vector<std::uint32_t> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("trace_dual_multi: starting vertices must be distinct");
  }
  std::vector<std::uint32_t> out;
  out.reserve(xs.size());
  for (auto x : xs) out.push_back(trace_dual(log, x, t, s));
  return out;
}

std::vector<VertexAddr> trace_dual_multi(const EventLog& log, std::span<const VertexAddr> xs, double t) {
  std::vector<std::uint32_t> idx;
  for (const auto& x : xs) idx.push_back(log.ball().index_of(x));
  std::vector<VertexAddr> out;
  for (auto i : trace_dual_multi(log, idx, t, t)) out.push_back(log.ball().vertex(i));
  return out;
}

Configuration sample_nu_p(std::shared_ptr<const Ball> ball, double p, RngStream& rng) {
  if (!(p > 0 && p < 1)) throw ValidationError("density p must lie in (0, 1)");
  std::vector<std::uint8_t> occ(ball->vertex_count());
  for (auto& o : occ) o = rng.bernoulli(p) ? 1 : 0;
  return Configuration(std::move(ball), std::move(occ));
}

}  // namespace ssep
