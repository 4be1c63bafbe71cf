#pragma once

#include <cstdint>
#include <vector>

#include <memory>
#include <utility>

#include "ssep/graphical.hpp"
#include "ssep/lazy_tree.hpp"
#include "ssep/observables.hpp"

namespace ssep {

/// Replicated additive-functional runs on the lazily realized ball.
struct XiJob {
  int degree = 2;
  int radius = 1;
  double density = 0.5;
  std::vector<double> times;  // ascending checkpoints; the last is the horizon
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct XiBatch {
  /// xi[i][k]: replicate i at times[k]. Replicate i is driven by stream (seed, i).
  std::vector<std::vector<double>> xi;
  std::uint64_t boundary_visits = 0;

  /// Records at checkpoint k, in replicate order.
  std::vector<XiRecord> records_at(std::size_t k, const XiJob& job) const;
  std::vector<double> column(std::size_t k) const;
};

XiBatch run_xi(const XiJob& job, const LocalFunction& f);

/// Copies the current realization of `tree` onto a materialized ball of the
/// same degree and radius: eta_0 and the full event log up to the horizon.
std::pair<Configuration, EventLog> materialize(LazyTree& tree, std::shared_ptr<const Ball> ball);

}  // namespace ssep
