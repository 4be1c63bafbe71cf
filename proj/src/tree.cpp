#include "ssep/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "ssep/errors.hpp"

namespace ssep {

void validate_degree(int degree) {
  if (degree < 2 || degree > 255) {
    throw ValidationError("degree must be in [2, 255], got " + std::to_string(degree));
  }
}

VertexAddr::VertexAddr(std::vector<std::uint8_t> word, int degree) : word_(std::move(word)) {
  validate_degree(degree);
  for (std::size_t i = 0; i < word_.size(); ++i) {
    const int limit = i == 0 ? degree + 1 : degree;
    if (word_[i] >= limit) {
      throw ValidationError("malformed vertex word: letter " + std::to_string(word_[i]) +
                            " at position " + std::to_string(i) + " (limit " +
                            std::to_string(limit) + ")");
    }
  }
}

VertexAddr VertexAddr::parse(std::string_view dotted, int degree) {
  std::vector<std::uint8_t> word;
  if (!dotted.empty()) {
    std::size_t pos = 0;
    while (true) {
      const std::size_t dot = dotted.find('.', pos);
      const std::string_view part =
          dotted.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
      unsigned value = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
      if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || value > 255) {
        throw ValidationError("malformed vertex word '" + std::string(dotted) + "'");
      }
      word.push_back(static_cast<std::uint8_t>(value));
      if (dot == std::string_view::npos) break;
      pos = dot + 1;
    }
  }
  return VertexAddr(std::move(word), degree);
}

VertexAddr VertexAddr::father() const {
  if (is_root()) throw ValidationError("the root has no father");
  VertexAddr f;
  f.word_.assign(word_.begin(), word_.end() - 1);
  return f;
}

VertexAddr VertexAddr::child(int letter, int degree) const {
  if (letter < 0 || letter >= child_count(*this, degree)) {
    throw ValidationError("child letter " + std::to_string(letter) + " out of range");
  }
  VertexAddr c = *this;
  c.word_.push_back(static_cast<std::uint8_t>(letter));
  return c;
}

std::string VertexAddr::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(word_[i]);
  }
  return out;
}

std::strong_ordering VertexAddr::operator<=>(const VertexAddr& other) const {
  if (auto c = word_.size() <=> other.word_.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(word_.begin(), word_.end(), other.word_.begin(),
                                                other.word_.end());
}

std::size_t VertexAddrHash::operator()(const VertexAddr& v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.depth();
  for (auto letter : v.word()) {
    h ^= letter + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::vector<VertexAddr> neighbors(const VertexAddr& v, int degree) {
  validate_degree(degree);
  std::vector<VertexAddr> out;
  out.reserve(static_cast<std::size_t>(degree) + 1);
  if (!v.is_root()) out.push_back(v.father());
  for (int c = 0; c < child_count(v, degree); ++c) out.push_back(v.child(c, degree));
  return out;
}

bool adjacent(const VertexAddr& u, const VertexAddr& v) {
  const auto& a = u.depth() < v.depth() ? u : v;
  const auto& b = u.depth() < v.depth() ? v : u;
  return b.depth() == a.depth() + 1 && std::equal(a.word().begin(), a.word().end(), b.word().begin());
}

std::size_t distance(const VertexAddr& u, const VertexAddr& v) {
  const auto [iu, iv] = std::mismatch(u.word().begin(), u.word().end(), v.word().begin(), v.word().end());
  const auto common = static_cast<std::size_t>(iu - u.word().begin());
  return u.depth() + v.depth() - 2 * common;
}

std::size_t ball_vertex_count(int degree, int radius) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  std::size_t shell = static_cast<std::size_t>(degree) + 1;
  for (int r = 1; r <= radius; ++r) {
    if (total > kMax - shell) return kMax;
    total += shell;
    if (r < radius) {
      if (shell > kMax / static_cast<std::size_t>(degree)) return kMax;
      shell *= static_cast<std::size_t>(degree);
    }
  }
  return total;
}

Ball build_ball(int degree, int radius, std::size_t cap) {
  validate_degree(degree);
  if (radius < 1) throw ValidationError("ball radius must be >= 1");
  const std::size_t n = ball_vertex_count(degree, radius);
  if (n > cap) {
    throw CapExceeded("ball(" + std::to_string(degree) + "," + std::to_string(radius) + ") has " +
                      (n == std::numeric_limits<std::size_t>::max() ? std::string("overflowing")
                                                                     : std::to_string(n)) +
                      " vertices; cap is " + std::to_string(cap));
  }
  Ball ball;
  ball.degree_ = degree;
  ball.radius_ = radius;
  ball.vertices_.reserve(n);
  ball.edges_.reserve(n - 1);
  ball.edge_ends_.reserve(n - 1);
  ball.incidence_.resize(n);
  ball.index_.reserve(n);

  // Breadth-first with children in letter order yields depth-then-word order;
  // each incidence list starts with the father.
  ball.vertices_.emplace_back();
  ball.index_.emplace(ball.vertices_[0], 0);
  for (std::size_t head = 0; head < ball.vertices_.size(); ++head) {
    if (static_cast<int>(ball.vertices_[head].depth()) == radius) continue;
    const VertexAddr parent = ball.vertices_[head];
    for (int c = 0; c < child_count(parent, degree); ++c) {
      const auto child_index = static_cast<std::uint32_t>(ball.vertices_.size());
      const auto edge_index = static_cast<std::uint32_t>(ball.edges_.size());
      ball.vertices_.push_back(parent.child(c, degree));
      ball.index_.emplace(ball.vertices_.back(), child_index);
      ball.edges_.push_back(EdgeAddr{parent, static_cast<std::uint8_t>(c)});
      ball.edge_ends_.emplace_back(static_cast<std::uint32_t>(head), child_index);
      ball.incidence_[head].push_back({child_index, edge_index});
      ball.incidence_[child_index].push_back({static_cast<std::uint32_t>(head), edge_index});
    }
  }
  return ball;
}

std::uint32_t Ball::index_of(const VertexAddr& v) const {
  const auto it = index_.find(v);
  if (it == index_.end()) {
    throw ValidationError("vertex '" + v.to_string() + "' lies outside ball of radius " +
                          std::to_string(radius_));
  }
  return it->second;
}

std::uint32_t Ball::edge_index(const VertexAddr& u, const VertexAddr& v) const {
  if (!adjacent(u, v)) {
    throw ValidationError("'" + u.to_string() + "' and '" + v.to_string() + "' are not adjacent");
  }
  const auto& deeper = u.depth() > v.depth() ? u : v;
  return index_of(deeper) - 1;
}

std::uint32_t Ball::edge_index(const EdgeAddr& e) const {
  return index_of(e.child(degree_)) - 1;
}

int truncation_radius(int degree, double support_radius, double horizon, double safety) {
  validate_degree(degree);
  if (!(support_radius >= 0) || !(horizon >= 0) || !(safety >= 0)) {
    throw ValidationError("truncation_radius: inputs must be non-negative");
  }
  const double jumps = (degree + 1) * horizon;
  const double r = std::ceil(support_radius + jumps + safety * std::sqrt(jumps));
  if (r > 1e6) throw ValidationError("truncation_radius: horizon too large");
  return std::max(1, static_cast<int>(r));
}

}  // namespace ssep
