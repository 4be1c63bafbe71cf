#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ssep/rng.hpp"
#include "ssep/tree.hpp"

namespace ssep {

/// One ring of the rate-1 clock on a ball edge: at `time` the occupancies of
/// the edge's endpoints are exchanged.
struct PoissonEvent {
  double time;
  std::uint32_t edge;
  bool operator==(const PoissonEvent&) const = default;
};

/// Occupancy vector eta in {0,1}^V over the vertices of a ball.
class Configuration {
 public:
  Configuration(std::shared_ptr<const Ball> ball, std::vector<std::uint8_t> occupancy);
  static Configuration vacant(std::shared_ptr<const Ball> ball);
  /// Vertex i occupied iff bit i of `bits` is set; needs |V| <= 64.
  static Configuration from_bits(std::shared_ptr<const Ball> ball, std::uint64_t bits);

  const Ball& ball() const { return *ball_; }
  const std::shared_ptr<const Ball>& ball_ptr() const { return ball_; }
  std::size_t size() const { return occ_.size(); }

  std::uint8_t operator[](std::size_t v) const { return occ_[v]; }
  std::uint8_t at(const VertexAddr& v) const { return occ_[ball_->index_of(v)]; }
  void set(std::size_t v, bool occupied) { occ_[v] = occupied ? 1 : 0; }
  /// eta -> eta^{x,y} for the endpoints of edge e.
  void swap_edge(std::size_t e) {
    std::swap(occ_[ball_->edge_parent(e)], occ_[ball_->edge_child(e)]);
  }
  Configuration swapped(std::size_t e) const {
    Configuration c = *this;
    c.swap_edge(e);
    return c;
  }

  std::size_t particle_count() const;
  std::uint64_t bits() const;
  const std::vector<std::uint8_t>& occupancy() const { return occ_; }

  bool operator==(const Configuration& other) const { return occ_ == other.occ_; }

 private:
  std::shared_ptr<const Ball> ball_;
  std::vector<std::uint8_t> occ_;
};

/// Sequential generator of the superposed clock process: a rate-|E| Poisson
/// stream on (0, horizon] whose points carry a uniformly drawn edge label.
/// Pulling it window by window gives the same events as materializing it.
class EventStream {
 public:
  EventStream(std::shared_ptr<const Ball> ball, double horizon, RngStream rng);

  std::optional<PoissonEvent> next();
  /// Appends every remaining event with time <= until.
  void fill_until(double until, std::vector<PoissonEvent>& out);

 private:
  std::shared_ptr<const Ball> ball_;
  double horizon_;
  RngStream rng_;
  double clock_ = 0.0;
  std::optional<PoissonEvent> lookahead_;
  bool exhausted_ = false;
};

/// Realized clock events on a ball over (0, horizon], strictly increasing in
/// time, with a per-vertex index for backward tracing.
class EventLog {
 public:
  EventLog(std::shared_ptr<const Ball> ball, double horizon, std::vector<PoissonEvent> events,
           std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static EventLog sample(std::shared_ptr<const Ball> ball, double horizon, RngStream rng);

  const Ball& ball() const { return *ball_; }
  const std::shared_ptr<const Ball>& ball_ptr() const { return ball_; }
  double horizon() const { return horizon_; }
  std::span<const PoissonEvent> events() const { return events_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Indices (into events()) of events whose edge touches vertex v, ascending.
  std::span<const std::uint32_t> touching(std::size_t v) const;
  /// Number of events with time <= t.
  std::size_t count_until(double t) const;

  /// Events in (s, horizon], shifted to start at 0.
  EventLog tail_from(double s) const;

  void write_csv(std::ostream& out) const;
  static EventLog read_csv(std::istream& in, std::shared_ptr<const Ball> ball);

 private:
  std::shared_ptr<const Ball> ball_;
  double horizon_;
  std::vector<PoissonEvent> events_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::vector<std::uint32_t> touch_offsets_;
  std::vector<std::uint32_t> touch_events_;
};

/// Applies all events with time <= t to eta0 in order.
Configuration evolve(const Configuration& eta0, const EventLog& log, double t);

/// Dual position X_s^{t,x}: walk back from (x, t) through events in
/// (t-s, t], crossing every edge whose clock rings at the current position.
std::uint32_t trace_dual(const EventLog& log, std::uint32_t x, double t, double s);
VertexAddr trace_dual(const EventLog& log, const VertexAddr& x, double t, double s);

/// Origin of the value at v just before event `event_limit` fires:
/// traces back through events with index < event_limit down to time 0.
std::uint32_t trace_to_origin(const EventLog& log, std::uint32_t v, std::size_t event_limit);

/// Componentwise trace of distinct vertices through the shared log.
std::vector<std::uint32_t> trace_dual_multi(const EventLog& log, std::span<const std::uint32_t> xs,
                                            double t, double s);
std::vector<VertexAddr> trace_dual_multi(const EventLog& log, std::span<const VertexAddr> xs, double t);

/// i.i.d. Bernoulli(p) occupancy.
Configuration sample_nu_p(std::shared_ptr<const Ball> ball, double p, RngStream& rng);

}  // namespace ssep
