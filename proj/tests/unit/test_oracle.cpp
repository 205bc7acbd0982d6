#include "cg/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

namespace {

namespace oracle = cg::oracle;
using cg::AgentId;

const double kE1 = std::exp(-1.0);

TEST(Kingman, ExpectedFixation) {
  EXPECT_EQ(oracle::kingman_expected_fixation(1), 0.0);
  EXPECT_EQ(oracle::kingman_expected_fixation(2), 1.0);
  EXPECT_DOUBLE_EQ(oracle::kingman_expected_fixation(4), 1.5);
  EXPECT_DOUBLE_EQ(oracle::kingman_expected_fixation(200), 1.99);
  EXPECT_THROW(oracle::kingman_expected_fixation(0), std::invalid_argument);
  for (std::size_t n = 1; n <= 2000; n += 37)
    EXPECT_NEAR(oracle::kingman_expected_fixation(n), oracle::kingman_expected_fixation_sum(n),
                1e-13);
}

TEST(Moments, PairMoment) {
  EXPECT_EQ(oracle::pair_moment_exact(3.0, 0.0), 1.0);
  EXPECT_NEAR(oracle::pair_moment_exact(1.0, 1.0), 0.36788, 1e-5);
  EXPECT_EQ(oracle::pair_moment_exact(0.0, 5.0), 1.0);
}

TEST(Moments, SecondFactorial) {
  const auto edge = cg::complete_graph(2, 1.0);
  EXPECT_EQ(oracle::second_factorial_moment(edge, 0, 0.0), 0.0);
  EXPECT_NEAR(oracle::second_factorial_moment(edge, 0, 1.0), 1.0 - kE1, 1e-15);
  const auto k3 = cg::complete_graph(3, 1.0);
  EXPECT_NEAR(oracle::second_factorial_moment(k3, 1, 1.0), 2.0 * (1.0 - kE1), 1e-15);
}

TEST(Moments, WeightedSumSecondMoment) {
  const auto k4 = cg::complete_graph(4, 1.3);
  const std::vector<double> ones(4, 1.0);
  for (double t : {0.0, 0.4, 2.0, 10.0})
    EXPECT_NEAR(oracle::weighted_sum_second_moment(k4, ones, t), 16.0, 1e-12);

  const std::vector<std::pair<AgentId, AgentId>> e{{0, 1}, {1, 2}};
  const auto p3 = cg::from_edge_list(3, e);
  const std::vector<double> f{0.5, -2.0, 3.0};
  const double sum = 0.5 - 2.0 + 3.0;
  EXPECT_NEAR(oracle::weighted_sum_second_moment(p3, f, 0.0), sum * sum, 1e-12);

  const auto edge = cg::complete_graph(2, 1.0);
  const std::vector<double> f10{1.0, 0.0};
  EXPECT_NEAR(oracle::weighted_sum_second_moment(edge, f10, 1.0), 2.0 - kE1, 1e-15);

  // Indicator of {i}: E X_i^2 = E X_i(X_i - 1) + E X_i with E X_i = 1.
  const auto torus = cg::torus_power_law(5, 1, 2.0);
  for (AgentId i = 0; i < 5; ++i) {
    std::vector<double> ind(5, 0.0);
    ind[i] = 1.0;
    EXPECT_NEAR(oracle::weighted_sum_second_moment(torus, ind, 0.7),
                1.0 + oracle::second_factorial_moment(torus, i, 0.7), 1e-14);
  }
}

TEST(Bounds, KingmanTail) {
  const auto a = oracle::kingman_tail_bound(2, 1.0, 1.0);
  EXPECT_EQ(a.value, 1.0);
  EXPECT_EQ(a.raw, 1.0);
  EXPECT_EQ(oracle::kingman_tail_bound(4, 1.0, 1.0).value, 0.5);
  EXPECT_NEAR(oracle::kingman_tail_bound(2, 2.0, 10.0).value, 0.05, 1e-15);
  const auto capped = oracle::kingman_tail_bound(2, 0.1, 1.0);
  EXPECT_EQ(capped.value, 1.0);
  EXPECT_DOUBLE_EQ(capped.raw, 10.0);
  EXPECT_THROW(oracle::kingman_tail_bound(1, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(oracle::kingman_tail_bound(3, 0.0, 1.0), std::invalid_argument);
}

TEST(Bounds, MeanFixation) {
  const auto k6 = oracle::mean_fixation_bounds(cg::complete_graph(6, 1.0));
  ASSERT_TRUE(k6.kingman.has_value());
  EXPECT_EQ(*k6.kingman, 2.0);
  EXPECT_EQ(k6.tree, 5.0);

  const std::vector<std::pair<AgentId, AgentId>> e{{0, 1}, {1, 2}};
  const auto path = oracle::mean_fixation_bounds(cg::from_edge_list(3, e));
  EXPECT_FALSE(path.kingman.has_value());
  EXPECT_EQ(path.tree, 2.0);

  const auto edge = oracle::mean_fixation_bounds(cg::complete_graph(2, 2.0));
  EXPECT_EQ(*edge.kingman, 1.0);
  EXPECT_EQ(edge.tree, 0.5);
}

TEST(Bounds, DegreeLowerBound) {
  EXPECT_DOUBLE_EQ(oracle::degree_lower_bound(cg::complete_graph(7, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(oracle::degree_lower_bound(cg::MeetingModel(5, {})), 5.0);
  cg::Rng rng(1);
  EXPECT_DOUBLE_EQ(oracle::degree_lower_bound(cg::random_regular_graph(8, 3, rng)), 2.0);
}

// sigma_m telescopes: each factor C(k-1,2)/(C(k,2)-1) = (k-1)/(k+1), so
// sigma_m = 6/(m(m+1)) and kappa_r = 3 - 6/(r+1).
TEST(NearClique, SigmaAndKappa) {
  EXPECT_EQ(oracle::sigma_m(2), 1.0);
  EXPECT_DOUBLE_EQ(oracle::sigma_m(3), 0.5);
  EXPECT_DOUBLE_EQ(oracle::sigma_m(4), (1.0 / 2.0) * (3.0 / 5.0));
  for (std::size_t m = 2; m <= 400; ++m) {
    const auto md = static_cast<double>(m);
    EXPECT_NEAR(oracle::sigma_m(m), 6.0 / (md * (md + 1.0)), 1e-14);
  }
  EXPECT_NEAR(oracle::sigma_m(20'000), 6.0 / (20'000.0 * 20'001.0), 1e-15);
  EXPECT_THROW(oracle::sigma_m(1), std::invalid_argument);

  EXPECT_EQ(oracle::kappa_r(2), 1.0);
  EXPECT_DOUBLE_EQ(oracle::kappa_r(3), 1.5);
  double previous = 0.0;
  for (std::size_t r = 2; r <= 300; ++r) {
    const double k = oracle::kappa_r(r);
    EXPECT_GT(k, previous);
    EXPECT_LT(k, 3.0);
    EXPECT_NEAR(k, 3.0 - 6.0 / (static_cast<double>(r) + 1.0), 1e-12);
    previous = k;
  }
}

TEST(NearClique, DensityBounds) {
  const auto b3 = oracle::near_clique_density_bounds(3);
  EXPECT_DOUBLE_EQ(b3.lower, 0.25);
  EXPECT_DOUBLE_EQ(b3.upper, 5.0 / 6.0);
  const auto b6 = oracle::near_clique_density_bounds(6);
  EXPECT_DOUBLE_EQ(b6.lower, 1.0 / 7.0);
  EXPECT_NEAR(b6.upper, 13.0 / 42.0, 1e-15);
  const auto big = oracle::near_clique_density_bounds(5000);
  EXPECT_NEAR(big.lower * 5000.0, 1.0, 1e-3);
  EXPECT_NEAR(big.upper * 5000.0, 1.0, 2e-3);
  EXPECT_THROW(oracle::near_clique_density_bounds(2), std::invalid_argument);
}

TEST(Dary, BoundsProperties) {
  for (std::size_t d = 1; d <= 30; ++d) {
    const double eps = oracle::epsilon_d(d);
    EXPECT_LT(eps, 1.0);
    EXPECT_GT(eps, 0.0);
    for (double z = 0.0; z <= 1.0; z += 0.125) {
      double prev_lower = 2.0, prev_upper = 2.0;
      for (double t = 0.0; t <= 1.0; t += 0.125) {
        const auto b = oracle::dary_phi_bounds(d, z, t);
        EXPECT_LE(b.lower, b.upper + 1e-15);
        EXPECT_GE(b.lower, 0.0);
        EXPECT_LE(b.upper, 1.0);
        EXPECT_LE(b.lower, prev_lower);
        EXPECT_LE(b.upper, prev_upper);
        prev_lower = b.lower;
        prev_upper = b.upper;
      }
      if (z + 0.125 <= 1.0) {
        EXPECT_GE(oracle::dary_phi_bounds(d, z, 0.6).upper,
                  oracle::dary_phi_bounds(d, z + 0.125, 0.6).upper);
      }
    }
  }
  const auto at1 = oracle::dary_phi_bounds(4, 1.0, 0.7);
  EXPECT_EQ(at1.lower, 0.0);
  EXPECT_EQ(at1.upper, 0.0);
  const auto t0 = oracle::dary_phi_bounds(4, 0.3, 0.0);
  EXPECT_DOUBLE_EQ(t0.lower, 0.7);
  EXPECT_DOUBLE_EQ(t0.upper, 0.7);
  const auto big = oracle::dary_phi_bounds(10'000, 0.0, 1.0);
  EXPECT_NEAR(big.upper * 10'000 / 2.0, 1.0, 1e-3);
  EXPECT_THROW(oracle::dary_phi_bounds(2, 1.5, 0.0), std::invalid_argument);
}

TEST(Pgw, ClosedForms) {
  for (double z : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(oracle::pgw_phi(0.0, z, 0.8), 1.0 - z);
  EXPECT_DOUBLE_EQ(oracle::pgw_phi(2.0, 0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(oracle::pgw_phi(1.0, 0.0, 1.0), 2.0 / 3.0);

  EXPECT_EQ(oracle::pgw_solvent_prob(1.0, 0.0), 1.0);
  EXPECT_EQ(oracle::pgw_conditional_pmf(1.0, 0.0, 1), 1.0);
  EXPECT_EQ(oracle::pgw_conditional_pmf(1.0, 0.0, 2), 0.0);
  EXPECT_DOUBLE_EQ(oracle::pgw_solvent_prob(1.0, 1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracle::pgw_conditional_pmf(1.0, 1.0, 1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracle::pgw_conditional_pmf(1.0, 1.0, 2), 2.0 / 9.0);
  EXPECT_THROW(oracle::pgw_conditional_pmf(1.0, 1.0, 0), std::invalid_argument);

  for (double c : {0.5, 1.0, 3.0}) {
    for (double t : {0.1, 0.5, 1.0}) {
      const double p = oracle::pgw_solvent_prob(c, t);
      double mass = 0.0, mean = 0.0;
      const std::size_t K = 400;
      for (std::size_t k = 1; k <= K; ++k) {
        const double q = oracle::pgw_conditional_pmf(c, t, k);
        mass += q;
        mean += static_cast<double>(k) * q;
      }
      EXPECT_NEAR(mass, 1.0 - std::pow(1.0 - p, double(K)), 1e-12);
      EXPECT_NEAR(p * mean, 1.0, 1e-9);  // E X(t) = 1
      // phi(0,t) is the solvent probability.
      EXPECT_NEAR(oracle::pgw_phi(c, 0.0, t), p, 1e-15);
    }
  }
}

TEST(Pgw, ErLimit) {
  EXPECT_EQ(oracle::er_limit_density(0.0), 1.0);
  EXPECT_DOUBLE_EQ(oracle::er_limit_density(1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracle::er_limit_density(2.0), 0.5);
}

TEST(Variance, MfBound) {
  EXPECT_EQ(oracle::mf_variance_bound(3.0, 2.0, 0.0), 0.0);
  EXPECT_EQ(oracle::mf_variance_bound(1.0, 1.0, 1.0), 0.5);
  EXPECT_EQ(oracle::mf_variance_bound(4.0, 0.0, 9.0), 0.0);
  EXPECT_THROW(oracle::mf_variance_bound(-1.0, 1.0, 1.0), std::invalid_argument);
}

}  // namespace
