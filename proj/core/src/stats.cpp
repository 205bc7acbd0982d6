#include "cg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace cg::stats {

double EstimateCI::z_score(double target) const noexcept {
  const double diff = mean - target;
  if (std_error == 0.0) return diff == 0.0 ? 0.0 : std::copysign(HUGE_VAL, diff);
  return diff / std_error;
}

bool EstimateCI::within(double target, double standard_errors) const noexcept {
  return std::abs(mean - target) <= standard_errors * std_error;
}

EstimateCI estimate(std::span<const double> values) {
  EstimateCI out;
  out.n_replicates = values.size();
  if (values.empty()) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  if (sorted.size() >= 2) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

void Histogram::add(std::int64_t value, std::uint64_t count) {
  bins[value] += count;
  total += count;
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [value, count] : other.bins) add(value, count);
}

std::uint64_t Histogram::count(std::int64_t value) const noexcept {
  auto it = bins.find(value);
  return it == bins.end() ? 0 : it->second;
}

double Histogram::frequency(std::int64_t value) const noexcept {
  return total == 0 ? 0.0 : static_cast<double>(count(value)) / static_cast<double>(total);
}

double chi_square_p_value(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  const double p = boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
  return std::max(p, kPValueFloor);
}

ChiSquare chi_square_gof(const Histogram& observed,
                         const std::map<std::int64_t, double>& expected,
                         double min_expected) {
  if (observed.total == 0) throw std::invalid_argument("empty histogram");
  for (const auto& [value, count] : observed.bins) {
    auto it = expected.find(value);
    if (count > 0 && (it == expected.end() || !(it->second > 0.0)))
      throw std::invalid_argument("observation outside the expected support");
  }
  const auto total = static_cast<double>(observed.total);
  ChiSquare out;
  std::size_t categories = 0;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (const auto& [value, p] : expected) {
    if (!(p > 0.0)) continue;
    const double e = total * p;
    const auto o = static_cast<double>(observed.count(value));
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    out.statistic += (o - e) * (o - e) / e;
    ++categories;
  }
  if (pooled_exp > 0.0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++categories;
  }
  out.dof = categories > 0 ? categories - 1 : 0;
  out.p_value = chi_square_p_value(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_homogeneity(const Histogram& a, const Histogram& b,
                                 double min_expected) {
  if (a.total == 0 || b.total == 0) throw std::invalid_argument("empty histogram");
  const auto na = static_cast<double>(a.total);
  const auto nb = static_cast<double>(b.total);
  const double n = na + nb;
  std::map<std::int64_t, std::pair<double, double>> table;
  for (const auto& [v, c] : a.bins) table[v].first += static_cast<double>(c);
  for (const auto& [v, c] : b.bins) table[v].second += static_cast<double>(c);

  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> pooled{0.0, 0.0};
  for (const auto& [v, counts] : table) {
    const double column = counts.first + counts.second;
    if (std::min(na, nb) * column / n < min_expected) {
      pooled.first += counts.first;
      pooled.second += counts.second;
    } else {
      cells.push_back(counts);
    }
  }
  if (pooled.first + pooled.second > 0.0) cells.push_back(pooled);

  ChiSquare out;
  for (const auto& [oa, ob] : cells) {
    const double column = oa + ob;
    const double ea = na * column / n;
    const double eb = nb * column / n;
    out.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  out.dof = cells.empty() ? 0 : cells.size() - 1;
  out.p_value = chi_square_p_value(out.statistic, out.dof);
  return out;
}

double total_variation(const Histogram& observed, const std::map<std::int64_t, double>& pmf,
                       std::span<const std::int64_t> support) {
  double sum = 0.0;
  for (std::int64_t v : support) {
    auto it = pmf.find(v);
    const double p = it == pmf.end() ? 0.0 : it->second;
    sum += std::abs(observed.frequency(v) - p);
  }
  return 0.5 * sum;
}

double loglog_slope(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("slope needs at least two matching points");
  const double n = static_cast<double>(times.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0) || !(values[k] > 0.0))
      throw std::invalid_argument("log-log slope needs positive data");
    const double x = std::log(times[k]), y = std::log(values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("times must not all coincide");
  return (n * sxy - sx * sy) / denom;
}

// ---------------------------------------------------------------------------

ModelSource fixed_model(MeetingModel model) {
  auto shared = std::make_shared<const MeetingModel>(std::move(model));
  return [shared](Rng&) { return *shared; };
}

namespace {

struct SimpleRun {
  RunResult result;
  std::size_t n = 0;
};

SimpleRun simulate_simple(const MeetingModel& model, ClockKind clock, Rng& rng) {
  const MoneyState init = MoneyState::simple(model.size());
  const auto schedule = sample_schedule(model, clock, rng);
  SimpleRun run{run_direct(schedule, init, rng), model.size()};
  verify_run(model, init, run.result);
  return run;
}

}  // namespace

EstimateCI estimate_density(const ModelSource& source, std::size_t replicates,
                            const SimulationOptions& options) {
  auto results = run_replicates<double>(replicates, options, [&](Rng& rng, std::size_t) {
    const MeetingModel model = source(rng);
    const auto run = simulate_simple(model, options.clock, rng);
    return static_cast<double>(run.result.solvent.size()) / static_cast<double>(run.n);
  });
  return estimate(results.values);
}

EstimateCI estimate_fixation_time(const MeetingModel& model, std::size_t replicates,
                                  const SimulationOptions& options) {
  auto results = run_replicates<double>(replicates, options, [&](Rng& rng, std::size_t) {
    return simulate_simple(model, options.clock, rng).result.absorption_time;
  });
  return estimate(results.values);
}

WinnerDistribution winner_distribution(const MeetingModel& model, const MoneyState& init,
                                       std::size_t replicates,
                                       const SimulationOptions& options) {
  auto results =
      run_replicates<std::int64_t>(replicates, options, [&](Rng& rng, std::size_t) {
        const auto schedule = sample_schedule(model, options.clock, rng);
        const auto result = run_direct(schedule, init, rng);
        verify_run(model, init, result);
        const auto winner = sole_winner(result);
        return winner ? static_cast<std::int64_t>(*winner) : std::int64_t{-1};
      });
  WinnerDistribution out;
  for (auto w : results.values) {
    if (w < 0) ++out.violations;
    else out.winners.add(w);
  }
  return out;
}

std::vector<EstimateCI> pair_moment_curve(const MeetingModel& model, AgentId i, AgentId j,
                                          std::span<const double> times,
                                          std::size_t replicates,
                                          const SimulationOptions& options) {
  const MoneyState init = MoneyState::simple(model.size());
  auto results = run_replicates<std::vector<double>>(
      replicates, options, [&](Rng& rng, std::size_t) {
        const auto run = simulate_simple(model, options.clock, rng);
        std::vector<double> row;
        row.reserve(times.size());
        for (double t : times)
          row.push_back(static_cast<double>(pair_product_at(run.result, init, i, j, t)));
        return row;
      });
  std::vector<EstimateCI> out;
  std::vector<double> column(results.values.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t r = 0; r < results.values.size(); ++r) column[r] = results.values[r][k];
    out.push_back(estimate(column));
  }
  return out;
}

FortuneDistribution conditional_fortune_hist(const ModelSource& source, AgentId agent,
                                             double t, std::size_t replicates,
                                             const SimulationOptions& options) {
  auto results = run_replicates<Money>(replicates, options, [&](Rng& rng, std::size_t) {
    const MeetingModel model = source(rng);
    const auto run = simulate_simple(model, options.clock, rng);
    return fortunes_at(run.result, MoneyState::simple(model.size()), t)[agent];
  });
  FortuneDistribution out;
  std::vector<double> solvent;
  solvent.reserve(results.values.size());
  for (Money x : results.values) {
    solvent.push_back(x > 0 ? 1.0 : 0.0);
    if (x > 0) out.conditional.add(static_cast<std::int64_t>(x));
  }
  out.solvent = estimate(solvent);
  return out;
}

DecayCurve density_decay_curve(const MeetingModel& model, std::span<const double> times,
                               std::size_t replicates, const SimulationOptions& options) {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (!(times[k] > 0.0) || (k > 0 && times[k] <= times[k - 1]))
      throw std::invalid_argument("times must be positive and increasing");
  const auto n = static_cast<double>(model.size());
  auto results = run_replicates<std::vector<double>>(
      replicates, options, [&](Rng& rng, std::size_t) {
        const auto run = simulate_simple(model, options.clock, rng);
        const auto curve = n_solvent_curve(run.result, model.size());
        std::vector<double> row;
        std::size_t step = 0;
        for (double t : times) {
          while (step + 1 < curve.size() && curve[step + 1].first <= t) ++step;
          row.push_back(static_cast<double>(curve[step].second) / n);
        }
        return row;
      });
  DecayCurve out;
  out.times.assign(times.begin(), times.end());
  std::vector<double> column(results.values.size());
  std::vector<double> window_t, window_rho;
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t r = 0; r < results.values.size(); ++r) column[r] = results.values[r][k];
    out.density.push_back(estimate(column));
    const double rho = out.density.back().mean;
    if (rho <= 0.9 && rho * n >= 10.0) {
      window_t.push_back(times[k]);
      window_rho.push_back(rho);
    }
  }
  out.window_points = window_t.size();
  if (window_t.size() >= 2) out.slope = loglog_slope(window_t, window_rho);
  return out;
}

}  // namespace cg::stats
