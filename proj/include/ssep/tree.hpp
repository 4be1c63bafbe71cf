#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ssep {

/// A vertex of the (d+1)-regular tree, addressed by its reduced path word
/// from a fixed root. The first letter picks one of the root's d+1 children,
/// every later letter one of the d children (the father is never a child).
class VertexAddr {
 public:
  VertexAddr() = default;  // the root
  VertexAddr(std::vector<std::uint8_t> word, int degree);

  static VertexAddr root() { return {}; }
  /// Parses the dotted form: "" is the root, "0.1.0" is [0,1,0].
  static VertexAddr parse(std::string_view dotted, int degree);

  const std::vector<std::uint8_t>& word() const { return word_; }
  std::size_t depth() const { return word_.size(); }
  bool is_root() const { return word_.empty(); }

  VertexAddr father() const;
  VertexAddr child(int letter, int degree) const;
  std::string to_string() const;

  /// Breadth-first lexicographic: shallower first, then by word.
  std::strong_ordering operator<=>(const VertexAddr& other) const;
  bool operator==(const VertexAddr& other) const = default;

 private:
  std::vector<std::uint8_t> word_;
};

struct VertexAddrHash {
  std::size_t operator()(const VertexAddr& v) const noexcept;
};

/// Number of children of `v`: d+1 at the root, d elsewhere.
inline int child_count(const VertexAddr& v, int degree) {
  return v.is_root() ? degree + 1 : degree;
}

void validate_degree(int degree);

std::vector<VertexAddr> neighbors(const VertexAddr& v, int degree);
bool adjacent(const VertexAddr& u, const VertexAddr& v);
std::size_t distance(const VertexAddr& u, const VertexAddr& v);

/// Unordered edge {parent, parent+letter}, stored by its shallower endpoint.
struct EdgeAddr {
  VertexAddr parent;
  std::uint8_t letter = 0;

  VertexAddr child(int degree) const { return parent.child(letter, degree); }
  bool operator==(const EdgeAddr&) const = default;
};

inline constexpr std::size_t kDefaultBallCap = std::size_t{1} << 22;

/// Closed-form vertex count of the radius-R ball: 1 + (d+1)(d^R - 1)/(d-1).
/// Returns SIZE_MAX on overflow.
std::size_t ball_vertex_count(int degree, int radius);

/// Finite ball of radius R around the root. Vertex i > 0 is the child
/// endpoint of edge i-1, so edges and non-root vertices share one ordering.
/// Edges leaving the ball do not exist: boundary vertices have degree 1.
class Ball {
 public:
  struct Incidence {
    std::uint32_t neighbor;
    std::uint32_t edge;
  };

  int degree() const { return degree_; }
  int radius() const { return radius_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<VertexAddr>& vertices() const { return vertices_; }
  const std::vector<EdgeAddr>& edges() const { return edges_; }
  const VertexAddr& vertex(std::size_t i) const { return vertices_[i]; }

  /// Endpoint indices of edge e: (father, child).
  std::uint32_t edge_parent(std::size_t e) const { return edge_ends_[e].first; }
  std::uint32_t edge_child(std::size_t e) const { return edge_ends_[e].second; }
  std::uint32_t other_end(std::size_t e, std::uint32_t v) const {
    const auto [a, b] = edge_ends_[e];
    return v == a ? b : a;
  }

  /// Incident (neighbor, edge) pairs of vertex v.
  const std::vector<Incidence>& incident(std::size_t v) const { return incidence_[v]; }

  bool contains(const VertexAddr& v) const { return index_.contains(v); }
  /// Index of `v`; throws ValidationError when v lies outside the ball.
  std::uint32_t index_of(const VertexAddr& v) const;
  /// Index of the edge {u,v}; throws when they are not a ball edge.
  std::uint32_t edge_index(const VertexAddr& u, const VertexAddr& v) const;
  std::uint32_t edge_index(const EdgeAddr& e) const;

 private:
  friend Ball build_ball(int degree, int radius, std::size_t cap);

  int degree_ = 0;
  int radius_ = 0;
  std::vector<VertexAddr> vertices_;
  std::vector<EdgeAddr> edges_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_ends_;
  std::vector<std::vector<Incidence>> incidence_;
  std::unordered_map<VertexAddr, std::uint32_t, VertexAddrHash> index_;
};

Ball build_ball(int degree, int radius, std::size_t cap = kDefaultBallCap);

/// Radius heuristic ceil(r0 + (d+1)T + c*sqrt((d+1)T)), clamped to >= 1.
/// A dual walk runs at total rate d+1, so within time T it makes about
/// (d+1)T jumps; the safety term covers their fluctuation.
int truncation_radius(int degree, double support_radius, double horizon, double safety);

}  // namespace ssep
