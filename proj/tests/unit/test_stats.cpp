#include "cg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cg/oracle.hpp"
#include "gtest/gtest.h"

namespace {

namespace stats = cg::stats;
using cg::MoneyState;

TEST(Estimate, MeanAndStandardError) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto e = stats::estimate(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0 / 4.0));
  EXPECT_EQ(e.n_replicates, 4u);
  const std::vector<double> one{7.0};
  EXPECT_EQ(stats::estimate(one).std_error, 0.0);
}

TEST(Estimate, OrderIndependent) {
  std::vector<double> values;
  cg::Rng rng(4);
  for (int k = 0; k < 5000; ++k) values.push_back(std::exp(10.0 * rng.uniform01()) * 1e-3);
  const auto base = stats::estimate(values);
  std::mt19937 shuffle_rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(values.begin(), values.end(), shuffle_rng);
    const auto again = stats::estimate(values);
    EXPECT_EQ(again.mean, base.mean);
    EXPECT_EQ(again.std_error, base.std_error);
  }
}

TEST(ChiSquare, PearsonExamples) {
  stats::Histogram perfect;
  for (int v = 0; v < 4; ++v) perfect.add(v, 25);
  const std::map<std::int64_t, double> uniform4{{0, .25}, {1, .25}, {2, .25}, {3, .25}};
  const auto zero = stats::chi_square_gof(perfect, uniform4);
  EXPECT_EQ(zero.statistic, 0.0);
  EXPECT_EQ(zero.p_value, 1.0);
  EXPECT_EQ(zero.dof, 3u);

  // Six equiprobable categories, counts (2,0,0,0,0,0): E = 1/3 each.
  stats::Histogram lopsided;
  lopsided.add(0, 2);
  std::map<std::int64_t, double> uniform6;
  for (int v = 0; v < 6; ++v) uniform6[v] = 1.0 / 6.0;
  const auto ten = stats::chi_square_gof(lopsided, uniform6);
  EXPECT_NEAR(ten.statistic, 10.0, 1e-12);
  EXPECT_EQ(ten.dof, 5u);

  stats::Histogram skewed;
  skewed.add(0, 500);
  skewed.add(1, 100);
  EXPECT_LT(stats::chi_square_gof(skewed, {{0, 0.5}, {1, 0.5}}).p_value, 1e-3);

  EXPECT_THROW(stats::chi_square_gof(stats::Histogram{}, uniform4), std::invalid_argument);
  stats::Histogram outside;
  outside.add(9);
  EXPECT_THROW(stats::chi_square_gof(outside, uniform4), std::invalid_argument);
}

TEST(ChiSquare, PValueKnownQuantiles) {
  // 95% quantiles of the chi-square law.
  EXPECT_NEAR(stats::chi_square_p_value(3.841459, 1), 0.05, 1e-6);
  EXPECT_NEAR(stats::chi_square_p_value(11.070498, 5), 0.05, 1e-6);
  EXPECT_EQ(stats::chi_square_p_value(1e4, 2), stats::kPValueFloor);
}

TEST(ChiSquare, Homogeneity) {
  stats::Histogram a, b;
  for (int v = 0; v < 5; ++v) {
    a.add(v, 1000);
    b.add(v, 2000);
  }
  EXPECT_NEAR(stats::chi_square_homogeneity(a, b).statistic, 0.0, 1e-12);
  b.add(0, 600);
  EXPECT_LT(stats::chi_square_homogeneity(a, b).p_value, 1e-3);

  // Two samples from one law pass.
  stats::Histogram x, y;
  cg::Rng rng(1);
  for (int k = 0; k < 20000; ++k) {
    x.add(static_cast<std::int64_t>(rng.below(7)));
    y.add(static_cast<std::int64_t>(rng.below(7)));
  }
  EXPECT_GT(stats::chi_square_homogeneity(x, y).p_value, 1e-3);
}

TEST(TotalVariation, Basic) {
  stats::Histogram h;
  h.add(1, 3);
  h.add(2, 1);
  const std::vector<std::int64_t> support{1, 2, 3};
  EXPECT_NEAR(stats::total_variation(h, {{1, 0.75}, {2, 0.25}}, support), 0.0, 1e-15);
  EXPECT_NEAR(stats::total_variation(h, {{1, 0.5}, {2, 0.5}}, support), 0.25, 1e-15);
}

TEST(LogLogSlope, Regression) {
  const std::vector<double> t{1, 2, 4, 8};
  const std::vector<double> flat{0.3, 0.3, 0.3, 0.3};
  EXPECT_NEAR(stats::loglog_slope(t, flat), 0.0, 1e-15);
  std::vector<double> power;
  for (double x : t) power.push_back(5.0 * std::pow(x, -0.5));
  EXPECT_NEAR(stats::loglog_slope(t, power), -0.5, 1e-12);
}

TEST(RunReplicates, ThreadCountDoesNotChangeResults) {
  auto work = [](cg::Rng& rng, std::size_t index) {
    return rng.uniform01() + static_cast<double>(index);
  };
  stats::SimulationOptions one{.seed = 5, .experiment_id = 2, .threads = 1};
  stats::SimulationOptions four = one;
  four.threads = 4;
  const auto a = stats::run_replicates<double>(500, one, work);
  const auto b = stats::run_replicates<double>(500, four, work);
  EXPECT_EQ(a.values, b.values);
  EXPECT_FALSE(a.truncated);

  std::atomic<bool> cancel{true};
  stats::SimulationOptions cancelled = one;
  cancelled.cancel = &cancel;
  const auto c = stats::run_replicates<double>(10, cancelled, work);
  EXPECT_TRUE(c.truncated);
  EXPECT_TRUE(c.values.empty());

  EXPECT_THROW(stats::run_replicates<double>(
                   10, four,
                   [](cg::Rng&, std::size_t i) -> double {
                     if (i == 7) throw cg::InvariantViolation("boom");
                     return 0.0;
                   }),
               cg::InvariantViolation);
}

TEST(Density, SingletonAndCompleteGraph) {
  const stats::SimulationOptions opts{.seed = 11};
  const auto single = stats::estimate_density(stats::fixed_model(cg::complete_graph(1, 1.0)), 10, opts);
  EXPECT_EQ(single.mean, 1.0);
  EXPECT_EQ(single.std_error, 0.0);

  const auto k8 = stats::estimate_density(stats::fixed_model(cg::complete_graph(8, 1.0)), 200, opts);
  EXPECT_DOUBLE_EQ(k8.mean, 1.0 / 8.0);
  EXPECT_EQ(k8.std_error, 0.0);
}

TEST(Density, DegreeLowerBoundHolds) {
  cg::Rng gen(3);
  const std::vector<cg::MeetingModel> graphs{
      cg::ring_of_near_cliques(4, 5), cg::random_regular_graph(30, 3, gen),
      cg::erdos_renyi(60, 2.0, gen), cg::dary_tree(2, 4)};
  for (const auto& g : graphs) {
    const auto est = stats::estimate_density(stats::fixed_model(g), 2000, {.seed = 8});
    const double bound = cg::oracle::degree_lower_bound(g) / static_cast<double>(g.size());
    EXPECT_GE(est.mean, bound - 3.0 * est.std_error);
  }
}

TEST(FixationTime, ExamplesAndScaling) {
  const stats::SimulationOptions opts{.seed = 21};
  const auto edge = stats::estimate_fixation_time(cg::complete_graph(2, 1.0), 20'000, opts);
  EXPECT_TRUE(edge.within(1.0, 3.0));

  const auto model = cg::torus_power_law(6, 1, 1.0);
  const auto base = stats::estimate_fixation_time(model, 300, opts);
  const auto fast = stats::estimate_fixation_time(model.scaled(4.0), 300, opts);
  EXPECT_NEAR(fast.mean * 4.0, base.mean, 1e-12 * base.mean);
}

TEST(FixationTime, KingmanDomination) {
  const auto model = cg::torus_power_law(8, 1, 1.5);
  const double delta = model.min_rate();
  const auto est = stats::estimate_fixation_time(model, 2000, {.seed = 2});
  EXPECT_LE(est.mean, 2.0 / delta + 3.0 * est.std_error);

  // Tail bound P(N(t) > r) <= 2/(r delta t) at a few (r, t).
  const std::vector<double> times{0.5, 1.0, 2.0};
  for (std::size_t r : {2u, 3u, 5u}) {
    for (double t : times) {
      std::vector<double> exceed;
      for (int s = 0; s < 2000; ++s) {
        cg::Rng rng = cg::Rng::stream(77, r, s);
        const auto res = cg::run_direct(
            cg::sample_schedule(model, cg::ClockKind::Exponential, rng),
            MoneyState::simple(model.size()), rng);
        exceed.push_back(cg::fortunes_at(res, MoneyState::simple(model.size()), t)
                                     .solvent_count() > r
                             ? 1.0
                             : 0.0);
      }
      const auto p = stats::estimate(exceed);
      EXPECT_LE(p.mean, cg::oracle::kingman_tail_bound(r, delta, t).value + 3.0 * p.std_error);
    }
  }
}

TEST(Winners, UniformStandardizedAndSingleton) {
  const auto k5 = stats::winner_distribution(cg::complete_graph(5, 1.0), MoneyState::simple(5),
                                             20'000, {.seed = 4});
  EXPECT_EQ(k5.violations, 0u);
  for (int a = 0; a < 5; ++a) EXPECT_NEAR(k5.winners.frequency(a), 0.2, 0.015);

  const auto w = stats::winner_distribution(cg::complete_graph(2, 1.0),
                                            MoneyState::weighted({3, 1}), 20'000, {.seed = 5});
  EXPECT_NEAR(w.winners.frequency(0), 0.75, 0.015);

  const auto one = stats::winner_distribution(cg::complete_graph(1, 1.0), MoneyState::simple(1),
                                              10, {.seed = 6});
  EXPECT_EQ(one.winners.count(0), 10u);

  const std::vector<std::pair<cg::AgentId, cg::AgentId>> e{{0, 1}, {1, 2}};
  const auto path = stats::winner_distribution(cg::from_edge_list(3, e), MoneyState::simple(3),
                                               2000, {.seed = 7});
  EXPECT_GT(path.violations, 0u);  // both ends can survive
}

TEST(PairMoments, Curve) {
  const std::vector<double> times{0.0, 0.5, 1.0, 50.0};
  const auto curve = stats::pair_moment_curve(cg::complete_graph(10, 1.0), 0, 1, times, 5000,
                                              {.seed = 9});
  EXPECT_EQ(curve[0].mean, 1.0);
  EXPECT_EQ(curve[0].std_error, 0.0);
  for (std::size_t k = 1; k < 3; ++k)
    EXPECT_TRUE(curve[k].within(std::exp(-times[k]), 3.0)) << curve[k].mean;
  EXPECT_EQ(curve[3].mean, 0.0);
}

TEST(ConditionalFortune, PointMasses) {
  const auto at0 = stats::conditional_fortune_hist(stats::fixed_model(cg::dary_tree(2, 3)), 0,
                                                   0.0, 500, {.seed = 1});
  EXPECT_EQ(at0.conditional.count(1), 500u);
  EXPECT_EQ(at0.solvent.mean, 1.0);

  const auto isolated = stats::conditional_fortune_hist(
      stats::fixed_model(cg::MeetingModel(3, {{1, 2, 1.0}})), 0, 5.0, 500, {.seed = 1});
  EXPECT_EQ(isolated.conditional.count(1), 500u);
}

TEST(DecayCurve, SmallTimesAndValidation) {
  const std::vector<double> times{1e-6, 1e-5};
  const auto curve = stats::density_decay_curve(cg::complete_graph(30, 1.0), times, 200,
                                                {.seed = 2});
  EXPECT_GT(curve.density[0].mean, 0.98);
  EXPECT_FALSE(curve.slope.has_value());
  const std::vector<double> bad{0.5, 0.2};
  EXPECT_THROW(stats::density_decay_curve(cg::complete_graph(3, 1.0), bad, 10, {.seed = 2}),
               std::invalid_argument);
}

}  // namespace
