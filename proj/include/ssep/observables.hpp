#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ssep/graphical.hpp"
#include "ssep/lazy_tree.hpp"
#include "ssep/tree.hpp"

namespace ssep {

inline constexpr std::size_t kMaxLocalSites = 16;

/// Local function F(eta) = H(eta(x_1), ..., eta(x_m)). Table entry `w`
/// holds H at the pattern whose i-th site value is bit i of w.
class LocalFunction {
 public:
  LocalFunction(std::vector<VertexAddr> sites, std::vector<double> table);

  std::size_t m() const { return sites_.size(); }
  const std::vector<VertexAddr>& sites() const { return sites_; }
  const std::vector<double>& table() const { return table_; }
  double operator()(std::uint32_t pattern) const { return table_[pattern]; }
  /// K_H = max |H|.
  double sup_norm() const { return sup_norm_; }
  /// Largest distance from the root to a site.
  std::size_t support_radius() const;
  bool is_zero() const;

  /// a*F + b*G over identical site lists.
  static LocalFunction combine(double a, const LocalFunction& f, double b, const LocalFunction& g);

  /// Text format: "sites: <comma-separated dotted words>" then 2^m lines
  /// "bits,value" with bits written site 1 first.
  void write(std::ostream& out) const;
  static LocalFunction read(std::istream& in, int degree);

 private:
  std::vector<VertexAddr> sites_;
  std::vector<double> table_;
  double sup_norm_ = 0.0;
};

double mean_under_nu_p(const LocalFunction& f, double p);
LocalFunction center(const LocalFunction& f, double p);
bool is_centered(const LocalFunction& f, double p, double tol = 1e-12);
/// Throws NotCentered with a hint to center F first.
void require_centered(const LocalFunction& f, double p);

/// F(eta) = eta(x) - p.
LocalFunction occupation_function(const VertexAddr& x, double p);
/// Centered product eta(x) eta(y) - p^2.
LocalFunction product_function(const VertexAddr& x, const VertexAddr& y, double p);

double eval(const LocalFunction& f, const Configuration& eta);
/// Pattern index of F's sites in eta (sites given as ball indices).
std::uint32_t pattern_of(std::span<const std::uint32_t> site_index, const Configuration& eta);

struct XiRecord {
  std::uint64_t path_id = 0;
  double t = 0.0;
  double xi = 0.0;
  std::uint64_t seed = 0;
};

/// Exact xi_t = int_0^t F(eta_s) ds along the realized log. Only events
/// touching supp(F) change F; the value entering a site comes from a dual
/// trace of the other endpoint.
XiRecord accumulate_xi(const Configuration& eta0, const EventLog& log, const LocalFunction& f, double t);

/// Same integral on a lazily realized tree (eta_0 drawn by the tree), read
/// off at each of the ascending `times`.
std::vector<double> accumulate_xi(LazyTree& tree, const LocalFunction& f, std::span<const double> times);

void write_xi_csv(std::ostream& out, std::span<const XiRecord> records);

}  // namespace ssep
