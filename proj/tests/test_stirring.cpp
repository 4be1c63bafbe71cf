#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ssep/errors.hpp"
#include "ssep/oracle.hpp"
#include "ssep/stirring.hpp"

namespace ssep {
namespace {

std::shared_ptr<const Ball> ball(int d, int r) { return std::make_shared<const Ball>(build_ball(d, r)); }
const VertexAddr kRoot = VertexAddr::root();

TEST(StirringTuple, Distinct) {
  EXPECT_THROW(StirringTuple({kRoot, kRoot}), ValidationError);
  EXPECT_THROW(StirringTuple(std::vector<VertexAddr>{}), ValidationError);
}

TEST(Stirring, ZeroDurationIsIdentity) {
  const StirringTuple s({kRoot, VertexAddr({1}, 2)});
  RngStream rng(1, 0);
  EXPECT_EQ(simulate_stirring(s, 2, 0.0, rng), s);
  EXPECT_THROW(simulate_stirring(s, 2, -1.0, rng), ValidationError);
}

TEST(Stirring, StaysDistinctOnTreeAndBall) {
  RngStream rng(2, 0);
  const StirringTuple s({kRoot, VertexAddr({0}, 3), VertexAddr({0, 1}, 3)});
  for (int i = 0; i < 500; ++i) {
    const auto e = simulate_stirring(s, 3, 2.0, rng);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) ASSERT_NE(e[a], e[b]);
  }
  auto b = ball(2, 2);
  for (int i = 0; i < 500; ++i) {
    std::uint32_t pos[] = {0, 1, 4};
    simulate_stirring(*b, pos, 2.0, rng);
    ASSERT_TRUE(pos[0] != pos[1] && pos[1] != pos[2] && pos[0] != pos[2]);
    for (auto p : pos) ASSERT_LT(p, b->vertex_count());
  }
}

TEST(Stirring, SingleWalkJumpRate) {
  // count jumps by observing the walk on a fine grid; on the tree every jump
  // changes the position, and at spacing 1e-3 two jumps in one cell are rare
  RngStream rng(3, 0);
  const double s = 2.0;
  std::vector<double> times;
  for (int k = 1; k <= 2000; ++k) times.push_back(k * s / 2000);
  const int reps = 400;
  double jumps = 0;
  for (int i = 0; i < reps; ++i) {
    const auto path = simulate_stirring_path(StirringTuple({kRoot}), 2, times, rng);
    VertexAddr prev = kRoot;
    for (const auto& t : path) {
      jumps += !(t[0] == prev);
      prev = t[0];
    }
  }
  const double mean = jumps / reps;
  EXPECT_NEAR(mean, 3 * s, 3 * std::sqrt(3 * s / reps) + 0.02);
}

TEST(Stirring, PairLawMatchesUniformization) {
  auto b = ball(2, 1);
  const auto gen = build_stirring_generator(*b, 2);
  const TupleSpace space(4, 2);
  const std::uint32_t start[] = {0, 1};
  std::vector<double> delta(space.size(), 0.0);
  delta[space.rank(start)] = 1.0;
  const auto exact = semigroup_apply(gen, delta, 0.5);
  const int reps = 40000;
  std::vector<double> freq(space.size(), 0.0);
  RngStream rng(4, 0);
  for (int i = 0; i < reps; ++i) {
    std::uint32_t pos[] = {0, 1};
    simulate_stirring(*b, pos, 0.5, rng);
    freq[space.rank(pos)] += 1.0 / reps;
  }
  for (std::size_t r = 0; r < space.size(); ++r) {
    EXPECT_NEAR(freq[r], exact[r], 3 * std::sqrt(exact[r] * (1 - exact[r]) / reps) + 1e-12) << r;
  }
}

TEST(HeatKernel, SmallTimes) {
  RngStream rng(5, 0);
  EXPECT_GT(heat_kernel_mc(kRoot, kRoot, 2, 1e-4, 2000, rng).value, 0.99);
  EXPECT_LT(heat_kernel_mc(kRoot, VertexAddr({0, 0}, 2), 2, 1e-4, 2000, rng).value, 0.01);
}

TEST(HeatKernel, BoundedByExponentialDecay) {
  for (int d : {2, 3}) {
    for (double u : {0.5, 1.0, 2.0, 4.0}) {
      RngStream rng(6, static_cast<std::uint64_t>(d * 100 + u * 10));
      const auto e = heat_kernel_mc(kRoot, kRoot, d, u, 100000, rng);
      const double bound = std::exp(-u * std::pow(std::sqrt(d) - 1, 2));
      EXPECT_LE(e.value, bound + 3 * e.std_error) << d << " " << u;
    }
  }
  EXPECT_NEAR(std::exp(-std::pow(std::sqrt(2.0) - 1, 2)), 0.8423, 1e-4);
}

TEST(ExactBeta, StarValues) {
  auto b = ball(2, 1);
  const auto table = exact_beta(b, StirringTuple({kRoot}), 1.0);
  EXPECT_NEAR(table.values()[0], 0.4, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(table.values()[static_cast<std::size_t>(i)], 0.2, 1e-12);
}

TEST(ExactG, StarExampleAndMonteCarlo) {
  auto b = ball(2, 1);
  auto eta = Configuration::vacant(b);
  eta.set(0, true);
  const auto f = occupation_function(kRoot, 0.5);
  const auto table = exact_beta(b, StirringTuple({kRoot}), 1.0);
  EXPECT_NEAR(exact_G(eta, f, table), -0.1, 1e-12);
  RngStream rng(7, 0);
  const auto mc = resolvent_mc_G(eta, f, 1.0, 40000, rng);
  EXPECT_NEAR(mc.value, -0.1, 3 * mc.std_error);
  EXPECT_LE(std::fabs(mc.value), f.sup_norm() / 1.0);
}

TEST(ExactG, ZeroAndLinearity) {
  auto b = ball(2, 2);
  const std::vector<VertexAddr> sites{kRoot, VertexAddr({2}, 2)};
  const LocalFunction f1(sites, {0.3, -0.1, 0.2, -0.4});
  const LocalFunction f2(sites, {-1, 0.5, 0.25, 0.25});
  const LocalFunction zero(sites, {0, 0, 0, 0});
  const auto table = exact_beta(b, StirringTuple(sites), 0.6);
  RngStream rng(8, 0);
  for (int i = 0; i < 20; ++i) {
    const auto eta = sample_nu_p(b, 0.5, rng);
    EXPECT_EQ(exact_G(eta, zero, table), 0.0);
    const double lhs = exact_G(eta, LocalFunction::combine(2.0, f1, -3.0, f2), table);
    EXPECT_NEAR(lhs, 2 * exact_G(eta, f1, table) - 3 * exact_G(eta, f2, table), 1e-12);
    EXPECT_LE(std::fabs(exact_G(eta, f1, table)), f1.sup_norm() / 0.6 + 1e-12);
  }
  const auto mc = resolvent_mc_G(Configuration::vacant(b), zero, 1.0, 10, rng);
  EXPECT_EQ(mc.value, 0.0);
  EXPECT_THROW(exact_G(Configuration::vacant(b), occupation_function(kRoot, 0.5), table), ValidationError);
}

TEST(ExactG, MonteCarloAgreementOnRandomCases) {
  auto b = ball(2, 2);
  const std::vector<VertexAddr> sites{VertexAddr({0}, 2), kRoot};
  const auto f = product_function(sites[0], sites[1], 0.5);
  RngStream rng(9, 0);
  int outside = 0;
  for (int i = 0; i < 50; ++i) {
    const double lambda = 0.2 + 2.0 * rng.uniform();
    const auto table = exact_beta(b, StirringTuple(sites), lambda);
    const auto eta = sample_nu_p(b, 0.5, rng);
    const auto mc = resolvent_mc_G(eta, f, lambda, 4000, rng);
    const double exact = exact_G(eta, f, table);
    outside += std::fabs(mc.value - exact) > 3 * mc.std_error;
    EXPECT_LE(std::fabs(mc.value - exact), 4 * mc.std_error) << i;
  }
  // 3-SE excursions: expected 0.135 of 50
  EXPECT_LE(outside, 2);
}

TEST(ExactBeta, NormalizationRandomInstances) {
  RngStream rng(10, 0);
  for (int i = 0; i < 10; ++i) {
    const int d = 2 + static_cast<int>(rng.below(2));
    auto b = ball(d, 2);
    const double lambda = 0.1 + 3 * rng.uniform();
    const auto table = exact_beta(b, StirringTuple({kRoot, VertexAddr({0}, d)}), lambda);
    double s = 0;
    for (double v : table.values()) {
      EXPECT_GE(v, -1e-14);
      s += v;
    }
    EXPECT_NEAR(lambda * s, 1.0, 1e-10);
  }
}

TEST(ResolventTable, CsvExport) {
  auto b = ball(2, 1);
  const auto table = exact_beta(b, StirringTuple({kRoot}), 1.0);
  std::ostringstream os;
  table.write_csv(os);
  const auto text = os.str();
  EXPECT_EQ(text.rfind("# ssep-resolvent v1", 0), 0U);
  EXPECT_NE(text.find("tuple,value"), std::string::npos);
  EXPECT_NE(text.find("\n0,0.2"), std::string::npos);
}

}  // namespace
}  // namespace ssep
