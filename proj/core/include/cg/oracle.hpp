#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "cg/models.hpp"

namespace cg::oracle {

/// A probability bound reported both raw and capped at 1.
struct CappedBound {
  double value = 0.0;
  double raw = 0.0;
};

struct FixationBounds {
  /// 2/delta with delta the minimum over all pairs; empty when some pair
  /// never meets.
  std::optional<double> kingman;
  /// (n-1)/delta with delta the minimum positive rate.
  double tree = 0.0;
};

struct DaryBounds {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon_d = 0.0;
};

struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Expected fixation time of the complete-graph process with unit rates.
double kingman_expected_fixation(std::size_t n);
/// Same quantity through the explicit sum over m of 1/C(m,2).
double kingman_expected_fixation_sum(std::size_t n);

double pair_moment_exact(double rate, double t);
double second_factorial_moment(const MeetingModel& model, AgentId i, double t);
double weighted_sum_second_moment(const MeetingModel& model, std::span<const double> f,
                                  double t);

CappedBound kingman_tail_bound(std::size_t r, double delta, double t);
FixationBounds mean_fixation_bounds(const MeetingModel& model);
double degree_lower_bound(const MeetingModel& model);

double sigma_m(std::size_t m);
double kappa_r(std::size_t r);
DensityBounds near_clique_density_bounds(std::size_t r);

double epsilon_d(std::size_t d);
DaryBounds dary_phi_bounds(std::size_t d, double z, double t);

double pgw_phi(double c, double z, double t);
double pgw_solvent_prob(double c, double t);
double pgw_conditional_pmf(double c, double t, std::size_t k);
double er_limit_density(double c);

double mf_variance_bound(double nu_star, double lipschitz, double t);

}  // namespace cg::oracle
