#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ssep/rng.hpp"
#include "ssep/tree.hpp"

namespace ssep {

/// The ball of radius R in T_d, realized lazily: vertices, the rate-1 edge
/// clocks and the initial Bernoulli(p) occupancies are generated the first
/// time something looks at them. Clocks are cut into unit time blocks, and
/// each (edge, block) pair draws from its own Philox substream keyed by the
/// path hash of the edge's deeper endpoint, so a realization is a pure
/// function of the replicate's stream whatever order it is explored in.
///
/// Not thread-safe; one instance per worker, reset() between replicates.
class LazyTree {
 public:
  using Node = std::uint32_t;

  struct Params {
    int degree = 2;
    int radius = 1;
    double horizon = 1.0;
    double density = 0.5;
  };

  /// Clock ring on an edge incident to a tracked vertex.
  struct Ring {
    double time;
    Node a;
    Node b;
  };

  explicit LazyTree(Params params);

  /// Discards the current realization and starts the one driven by `rng`.
  void reset(const RngStream& rng);

  const Params& params() const { return params_; }
  Node root() const { return 0; }
  /// Node for `v`, creating the path from the root; throws if v is outside the ball.
  Node locate(const VertexAddr& v);
  VertexAddr address(Node n) const;
  int depth(Node n) const { return nodes_[n].depth; }
  Node parent(Node n) const { return nodes_[n].parent; }

  bool initial_occupancy(Node n);

  /// Latest ring strictly inside (lower, upper) on an edge incident to v,
  /// as (time, other endpoint).
  std::optional<std::pair<double, Node>> latest_ring(Node v, double upper, double lower);

  /// X_time^{time,v} started just before `time`: the vertex whose initial
  /// value eta_{time-}(v) copies.
  Node trace_to_origin(Node v, double time);

  /// All rings in (0, until] on edges touching `sites`, sorted by time.
  /// Ring::a is always a member of `sites`.
  void rings_touching(std::span<const Node> sites, double until, std::vector<Ring>& out);

  /// Every ring on the edge {parent(child), child}, ascending.
  std::vector<double> edge_rings(Node child);

  std::size_t node_count() const { return nodes_.size(); }
  /// Steps of dual traces that landed on a boundary vertex (depth R).
  std::uint64_t boundary_visits() const { return boundary_visits_; }

 private:
  struct NodeData {
    std::uint64_t hash;
    std::uint32_t parent;
    std::int32_t first_child;
    std::uint16_t depth;
    std::uint8_t letter;
    std::int8_t eta0;
  };
  /// One realized time block of an edge clock; blocks of an edge form a
  /// singly linked list through `blocks_`.
  struct BlockEntry {
    std::int32_t block;
    std::int32_t next;
    std::uint32_t offset;
    std::uint32_t count;
  };

  void expand(Node v);
  int children(Node v) const;
  /// Rings of the edge above `child` inside time block b, ascending.
  std::span<const double> block_rings(Node child, std::int32_t block);

  Params params_;
  RngStream rng_;
  std::vector<NodeData> nodes_;
  std::vector<std::int32_t> block_head_;  // per node, -1 when no block is realized
  // Edges queried in many blocks (those near the support) switch to a
  // dense block -> entry index of ceil(horizon) slots.
  std::vector<std::int32_t> dense_at_;    // per node, -1 while the list is short
  std::vector<std::int32_t> dense_pool_;
  std::vector<BlockEntry> blocks_;
  std::vector<double> ring_times_;
  std::uint64_t boundary_visits_ = 0;
};

}  // namespace ssep
