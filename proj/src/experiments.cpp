#include "ssep/experiments.hpp"

#include <algorithm>

#include "ssep/errors.hpp"
#include "ssep/lazy_tree.hpp"
#include "ssep/parallel.hpp"

namespace ssep {

std::vector<XiRecord> XiBatch::records_at(std::size_t k, const XiJob& job) const {
  std::vector<XiRecord> out;
  out.reserve(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) out.push_back({i, job.times[k], xi[i][k], job.seed});
  return out;
}

std::vector<double> XiBatch::column(std::size_t k) const {
  std::vector<double> out;
  out.reserve(xi.size());
  for (const auto& row : xi) out.push_back(row[k]);
  return out;
}

XiBatch run_xi(const XiJob& job, const LocalFunction& f) {
  if (job.times.empty() || !std::is_sorted(job.times.begin(), job.times.end()) || !(job.times.front() > 0)) {
    throw ValidationError("xi run: times must be positive and ascending");
  }
  if (f.support_radius() > static_cast<std::size_t>(job.radius)) {
    throw ValidationError("xi run: F's support lies outside the ball");
  }
  const LazyTree::Params params{job.degree, job.radius, job.times.back(), job.density};
  struct Row {
    std::vector<double> xi;
    std::uint64_t boundary = 0;
  };
  auto rows = parallel_map(
      job.reps, job.workers, [&] { return LazyTree(params); },
      [&](LazyTree& tree, std::size_t i) {
        tree.reset(RngStream(job.seed, i));
        Row r;
        r.xi = accumulate_xi(tree, f, job.times);
        r.boundary = tree.boundary_visits();
        return r;
      });
  XiBatch out;
  out.xi.reserve(rows.size());
  for (auto& r : rows) {
    out.boundary_visits += r.boundary;
    out.xi.push_back(std::move(r.xi));
  }
  return out;
}

std::pair<Configuration, EventLog> materialize(LazyTree& tree, std::shared_ptr<const Ball> ball) {
  const auto& params = tree.params();
  if (ball->degree() != params.degree || ball->radius() != params.radius) {
    throw ValidationError("materialize: ball and lazy tree differ in degree or radius");
  }
  std::vector<std::uint8_t> occ(ball->vertex_count());
  std::vector<PoissonEvent> events;
  for (std::size_t v = 0; v < ball->vertex_count(); ++v) {
    const auto node = tree.locate(ball->vertex(v));
    occ[v] = tree.initial_occupancy(node) ? 1 : 0;
    if (v == 0) continue;
    for (double t : tree.edge_rings(node)) events.push_back({t, static_cast<std::uint32_t>(v - 1)});
  }
  std::sort(events.begin(), events.end(), [](const PoissonEvent& a, const PoissonEvent& b) { return a.time < b.time; });
  return {Configuration(ball, std::move(occ)), EventLog(ball, params.horizon, std::move(events))};
}

}  // namespace ssep
