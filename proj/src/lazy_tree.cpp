#include "ssep/lazy_tree.hpp"

#include <algorithm>
#include <cmath>

#include "ssep/errors.hpp"

namespace ssep {
namespace {

constexpr std::uint64_t kRootHash = 0x6a09e667f3bcc908ULL;
constexpr std::uint64_t kOccupancySalt = 0xbb67ae8584caa73bULL;
constexpr std::uint64_t kClockSalt = 0x3c6ef372fe94f82bULL;

std::uint64_t child_hash(std::uint64_t parent, std::uint8_t letter) {
  return mix64(parent ^ mix64(std::uint64_t{letter} + 1));
}

}  // namespace

LazyTree::LazyTree(Params params) : params_(params), rng_(0, 0) {
  validate_degree(params_.degree);
  if (params_.radius < 1 || params_.radius > 60000) throw ValidationError("lazy tree radius out of range");
  if (!(params_.horizon > 0)) throw ValidationError("lazy tree horizon must be positive");
  if (!(params_.density > 0 && params_.density < 1)) throw ValidationError("density must lie in (0, 1)");
  reset(rng_);
}

void LazyTree::reset(const RngStream& rng) {
  rng_ = rng;
  nodes_.clear();
  block_head_.clear();
  dense_at_.clear();
  dense_pool_.clear();
  blocks_.clear();
  ring_times_.clear();
  boundary_visits_ = 0;
  nodes_.push_back(NodeData{kRootHash, 0, -1, 0, 0, -1});
}

int LazyTree::children(Node v) const {
  if (nodes_[v].depth >= params_.radius) return 0;
  return v == 0 ? params_.degree + 1 : params_.degree;
}

void LazyTree::expand(Node v) {
  if (nodes_[v].first_child >= 0) return;
  const int k = children(v);
  const auto first = static_cast<std::int32_t>(nodes_.size());
  const NodeData parent = nodes_[v];
  for (int c = 0; c < k; ++c) {
    nodes_.push_back(NodeData{child_hash(parent.hash, static_cast<std::uint8_t>(c)), v, -1,
                              static_cast<std::uint16_t>(parent.depth + 1), static_cast<std::uint8_t>(c),
                              -1});
  }
  nodes_[v].first_child = first;
}

LazyTree::Node LazyTree::locate(const VertexAddr& v) {
  if (static_cast<int>(v.depth()) > params_.radius) {
    throw ValidationError("vertex '" + v.to_string() + "' lies outside the ball");
  }
  Node n = root();
  for (auto letter : v.word()) {
    if (letter >= children(n)) throw ValidationError("malformed vertex word for this degree");
    expand(n);
    n = static_cast<Node>(nodes_[n].first_child + letter);
  }
  return n;
}

VertexAddr LazyTree::address(Node n) const {
  std::vector<std::uint8_t> word(nodes_[n].depth);
  for (auto i = word.size(); i-- > 0;) {
    word[i] = nodes_[n].letter;
    n = nodes_[n].parent;
  }
  return VertexAddr(std::move(word), params_.degree);
}

bool LazyTree::initial_occupancy(Node n) {
  auto& node = nodes_[n];
  if (node.eta0 < 0) {
    auto s = rng_.substream(mix64(node.hash ^ kOccupancySalt));
    node.eta0 = s.uniform() < params_.density ? 1 : 0;
  }
  return node.eta0 == 1;
}

std::span<const double> LazyTree::block_rings(Node child, std::int32_t block) {
  constexpr int kDenseAfter = 8;
  if (block_head_.size() < nodes_.size()) {
    block_head_.resize(nodes_.size(), -1);
    dense_at_.resize(nodes_.size(), -1);
  }
  auto found = [&](std::int32_t i) {
    return std::span<const double>(ring_times_).subspan(blocks_[i].offset, blocks_[i].count);
  };
  if (dense_at_[child] >= 0) {
    if (const auto i = dense_pool_[static_cast<std::size_t>(dense_at_[child] + block)]; i >= 0) return found(i);
  } else {
    int length = 0;
    for (auto i = block_head_[child]; i >= 0; i = blocks_[i].next, ++length) {
      if (blocks_[i].block == block) return found(i);
    }
    if (length >= kDenseAfter) {
      dense_at_[child] = static_cast<std::int32_t>(dense_pool_.size());
      dense_pool_.resize(dense_pool_.size() + static_cast<std::size_t>(std::ceil(params_.horizon)) + 1, -1);
      for (auto i = block_head_[child]; i >= 0; i = blocks_[i].next) {
        dense_pool_[static_cast<std::size_t>(dense_at_[child] + blocks_[i].block)] = i;
      }
    }
  }
  const double begin = static_cast<double>(block);
  const double end = std::min(begin + 1.0, params_.horizon);
  auto s = rng_.substream(mix64(nodes_[child].hash ^ mix64(static_cast<std::uint64_t>(block) ^ kClockSalt)));
  const auto offset = static_cast<std::uint32_t>(ring_times_.size());
  double t = begin;
  while (true) {
    double next;
    do {
      next = t + s.exponential(1.0);
    } while (next <= t);  // a zero gap would tie two rings
    if (next >= end) break;
    ring_times_.push_back(next);
    t = next;
  }
  blocks_.push_back(BlockEntry{block, block_head_[child], offset, static_cast<std::uint32_t>(ring_times_.size() - offset)});
  block_head_[child] = static_cast<std::int32_t>(blocks_.size() - 1);
  if (dense_at_[child] >= 0) dense_pool_[static_cast<std::size_t>(dense_at_[child] + block)] = block_head_[child];
  return std::span<const double>(ring_times_).subspan(offset, blocks_.back().count);
}

std::vector<double> LazyTree::edge_rings(Node child) {
  if (child == root() || child >= nodes_.size()) throw ValidationError("edge_rings: node has no parent edge");
  std::vector<double> out;
  const auto blocks = static_cast<std::int32_t>(std::ceil(params_.horizon));
  for (std::int32_t b = 0; b < blocks; ++b) {
    const auto r = block_rings(child, b);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::optional<std::pair<double, LazyTree::Node>> LazyTree::latest_ring(Node v, double upper, double lower) {
  upper = std::min(upper, params_.horizon + 1.0);
  if (!(upper > lower)) return std::nullopt;
  expand(v);
  const int k = children(v);
  const auto first = nodes_[v].first_child;
  for (auto block = static_cast<std::int32_t>(std::floor(upper)); block >= 0; --block) {
    if (block + 1 <= lower) break;
    double best = -1.0;
    Node best_node = v;
    auto consider = [&](Node child, Node other) {
      const auto rings = block_rings(child, block);
      const auto it = std::lower_bound(rings.begin(), rings.end(), upper);
      if (it != rings.begin() && *(it - 1) > lower && *(it - 1) > best) {
        best = *(it - 1);
        best_node = other;
      }
    };
    if (v != root()) consider(v, nodes_[v].parent);
    for (int c = 0; c < k; ++c) consider(static_cast<Node>(first + c), static_cast<Node>(first + c));
    if (best >= 0) return std::make_pair(best, best_node);
  }
  return std::nullopt;
}

LazyTree::Node LazyTree::trace_to_origin(Node v, double time) {
  double upper = time;
  while (auto ring = latest_ring(v, upper, 0.0)) {
    upper = ring->first;
    v = ring->second;
    if (nodes_[v].depth == params_.radius) ++boundary_visits_;
  }
  return v;
}

void LazyTree::rings_touching(std::span<const Node> sites, double until, std::vector<Ring>& out) {
  out.clear();
  auto is_site = [&](Node n) { return std::find(sites.begin(), sites.end(), n) != sites.end(); };
  auto collect = [&](Node child, Node a, Node b) {
    const auto last = static_cast<std::int32_t>(std::ceil(std::min(until, params_.horizon)));
    for (std::int32_t block = 0; block <= last; ++block) {
      for (double t : block_rings(child, block)) {
        if (t <= until) out.push_back(Ring{t, a, b});
      }
    }
  };
  for (Node site : sites) {
    expand(site);
    if (site != root()) {
      // An edge between two sites is collected once, from its deeper end.
      collect(site, site, nodes_[site].parent);
    }
    const int k = children(site);
    for (int c = 0; c < k; ++c) {
      const auto child = static_cast<Node>(nodes_[site].first_child + c);
      if (!is_site(child)) collect(child, site, child);
    }
  }
  std::sort(out.begin(), out.end(), [](const Ring& x, const Ring& y) { return x.time < y.time; });
}

}  // namespace ssep
