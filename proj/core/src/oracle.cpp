#include "cg/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <algorithm>
#include <stdexcept>

namespace cg::oracle {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

void require_unit(double v, const char* message) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0, message);
}

}  // namespace

double kingman_expected_fixation(std::size_t n) {
  require(n >= 1, "n must be >= 1");
  return 2.0 * (1.0 - 1.0 / static_cast<double>(n));
}

double kingman_expected_fixation_sum(std::size_t n) {
  require(n >= 1, "n must be >= 1");
  double sum = 0.0;
  for (std::size_t m = n; m >= 2; --m) {
    const auto md = static_cast<double>(m);
    sum += 2.0 / (md * (md - 1.0));
  }
  return sum;
}

double pair_moment_exact(double rate, double t) {
  require(rate >= 0.0 && t >= 0.0, "rate and t must be >= 0");
  return std::exp(-rate * t);
}

double second_factorial_moment(const MeetingModel& model, AgentId i, double t) {
  require(i < model.size(), "agent out of range");
  require(t >= 0.0, "t must be >= 0");
  double sum = 0.0;
  for (AgentId j : model.neighbors(i)) sum += -std::expm1(-model.rate(i, j) * t);
  return sum;
}

double weighted_sum_second_moment(const MeetingModel& model, std::span<const double> f,
                                  double t) {
  require(f.size() == model.size(), "f must have one entry per agent");
  require(t >= 0.0, "t must be >= 0");
  // Pairs with rate 0 contribute f_i f_j exp(0) to the cross term.
  double diagonal = 0.0;
  double sum_f = 0.0;
  double sum_f2 = 0.0;
  for (AgentId i = 0; i < model.size(); ++i) {
    diagonal += f[i] * f[i] * (1.0 + second_factorial_moment(model, i, t));
    sum_f += f[i];
    sum_f2 += f[i] * f[i];
  }
  double cross = sum_f * sum_f - sum_f2;
  for (const auto& e : model.edges())
    cross += 2.0 * f[e.i] * f[e.j] * std::expm1(-e.rate * t);
  return diagonal + cross;
}

CappedBound kingman_tail_bound(std::size_t r, double delta, double t) {
  require(r >= 2, "r must be >= 2");
  require(delta > 0.0 && t > 0.0, "delta and t must be positive");
  const double raw = 2.0 / (static_cast<double>(r) * delta * t);
  return {std::min(1.0, raw), raw};
}

FixationBounds mean_fixation_bounds(const MeetingModel& model) {
  FixationBounds out;
  const double delta = model.min_rate();
  const auto n = static_cast<double>(model.size());
  if (model.size() <= 1) {
    out.kingman = 0.0;
    out.tree = 0.0;
    return out;
  }
  if (delta > 0.0) out.tree = (n - 1.0) / delta;
  else out.tree = std::numeric_limits<double>::infinity();
  if (model.all_pairs_positive()) out.kingman = 2.0 / delta;
  return out;
}

double degree_lower_bound(const MeetingModel& model) {
  double sum = 0.0;
  for (AgentId i = 0; i < model.size(); ++i)
    sum += 1.0 / (1.0 + static_cast<double>(model.degree(i)));
  return sum;
}

double sigma_m(std::size_t m) {
  require(m >= 2, "m must be >= 2");
  double product = 1.0;
  if (m <= 10'000) {
    auto choose2 = [](std::uint64_t k) { return k * (k - 1) / 2; };
    for (std::uint64_t i = 0; i + 3 <= m; ++i) {
      product *= static_cast<double>(choose2(m - i - 1)) /
                 static_cast<double>(choose2(m - i) - 1);
    }
  } else {
    auto choose2 = [](double k) { return k * (k - 1.0) / 2.0; };
    const auto md = static_cast<double>(m);
    for (std::size_t i = 0; i + 3 <= m; ++i) {
      const double id = static_cast<double>(i);
      product *= choose2(md - id - 1.0) / (choose2(md - id) - 1.0);
    }
  }
  return product;
}

double kappa_r(std::size_t r) {
  require(r >= 2, "r must be >= 2");
  double sum = 0.0;
  for (std::size_t m = 2; m <= r; ++m) sum += sigma_m(m);
  return sum;
}

DensityBounds near_clique_density_bounds(std::size_t r) {
  require(r >= 3, "r must be >= 3");
  const auto rd = static_cast<double>(r);
  return {1.0 / (rd + 1.0), (1.0 / rd) * (1.0 + 2.0 * kappa_r(r) / (rd - 1.0))};
}

double epsilon_d(std::size_t d) {
  require(d >= 1, "d must be >= 1");
  const auto dd = static_cast<double>(d);
  return (2.0 / dd) * std::log1p(dd / 2.0);
}

DaryBounds dary_phi_bounds(std::size_t d, double z, double t) {
  require(d >= 1, "d must be >= 1");
  require_unit(z, "z must lie in [0, 1]");
  require_unit(t, "t must lie in [0, 1]");
  const auto dd = static_cast<double>(d);
  const double eps = epsilon_d(d);
  const double w = 1.0 - z;
  DaryBounds out;
  out.epsilon_d = eps;
  out.upper = 2.0 * w / (2.0 + dd * w * t);
  out.lower = 2.0 * w * (1.0 - eps) / (2.0 * (1.0 - eps) + dd * w * t);
  return out;
}

double pgw_phi(double c, double z, double t) {
  require(std::isfinite(c) && c >= 0.0, "c must be >= 0");
  require_unit(z, "z must lie in [0, 1]");
  require_unit(t, "t must lie in [0, 1]");
  const double w = 1.0 - z;
  return 2.0 * w / (2.0 + c * w * t);
}

double pgw_solvent_prob(double c, double t) {
  require(std::isfinite(c) && c >= 0.0, "c must be >= 0");
  require_unit(t, "t must lie in [0, 1]");
  return 2.0 / (2.0 + c * t);
}

double pgw_conditional_pmf(double c, double t, std::size_t k) {
  require(k >= 1, "k must be >= 1");
  const double p = pgw_solvent_prob(c, t);
  return p * std::pow(1.0 - p, static_cast<double>(k - 1));
}

double er_limit_density(double c) {
  require(std::isfinite(c) && c >= 0.0, "c must be >= 0");
  return 2.0 / (2.0 + c);
}

double mf_variance_bound(double nu_star, double lipschitz, double t) {
  require(nu_star >= 0.0 && lipschitz >= 0.0 && t >= 0.0, "inputs must be >= 0");
  return 0.5 * nu_star * lipschitz * lipschitz * t;
}

}  // namespace cg::oracle
