#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssep/observables.hpp"

namespace ssep {

/// Experiment configuration. On disk it is an INI file with [model],
/// [function] and [run] sections; any key may be overridden on the command
/// line as section.key=value.
struct ExperimentConfig {
  // [model]
  int degree = 2;
  double density = 0.5;
  std::optional<int> radius;  // empty: truncation_radius
  double safety = 3.0;
  std::size_t ball_cap = std::size_t{1} << 22;
  std::size_t ssep_cap = std::size_t{1} << 20;
  std::size_t tuple_cap = 200000;

  // [function]
  std::string kind = "occupation";  // occupation | product | table | file
  std::string sites;                // comma-separated dotted words
  std::vector<double> table;
  std::string file;
  bool center = false;

  // [run]
  std::vector<double> t_grid{40.0};
  double N = 50.0;
  double clt_t = 1.0;
  double gamma = 0.7;
  std::optional<double> lambda;  // empty: 1/N for clt, t^{-1/2} for mdp and decompose
  std::optional<double> sigma2;  // empty: exact for occupation F, duality estimate otherwise
  std::size_t reps = 10000;
  std::uint64_t seed = 12345;
  unsigned workers = 1;
  std::string output_dir = "ssep_out";
  std::vector<double> u_grid{0.5, 1.0};
  double duality_tolerance = 1e-3;
  std::size_t duality_reps = 10000;
  std::vector<double> heat_u{0.5, 1.0, 2.0, 4.0};
  std::vector<int> heat_degrees{2, 3};
  std::size_t heat_reps = 100000;
  int decompose_radius = 1;
  double decompose_t = 5.0;
  std::size_t decompose_paths = 100;

  /// Builds F as configured (centered when `center` is set).
  LocalFunction function() const;
  /// Largest root distance of F's sites.
  double support_radius() const;
  /// Ball radius for horizon T: the configured one or truncation_radius.
  int radius_for(double horizon) const;

  /// Resolved INI text, every field spelled out.
  void write(std::ostream& out) const;
};

/// Reads `path` (empty: defaults only), applies `overrides` ("section.key=value")
/// and the SSEP_OUTPUT_DIR / SSEP_WORKERS environment variables, and validates.
/// Throws ValidationError naming the offending field.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace ssep
