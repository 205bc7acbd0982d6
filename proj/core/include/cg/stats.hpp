#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "cg/engine.hpp"
#include "cg/models.hpp"
#include "cg/rng.hpp"

namespace cg::stats {

struct EstimateCI {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_replicates = 0;

  /// (mean - target) / std_error; 0 when both agree exactly.
  double z_score(double target) const noexcept;
  bool within(double target, double standard_errors) const noexcept;
};

/// Sample mean and standard error of the mean. Values are summed in sorted
/// order, so the result does not depend on the order replicates finished in.
EstimateCI estimate(std::span<const double> values);

struct Histogram {
  std::map<std::int64_t, std::uint64_t> bins;
  std::uint64_t total = 0;

  void add(std::int64_t value, std::uint64_t count = 1);
  void merge(const Histogram& other);
  std::uint64_t count(std::int64_t value) const noexcept;
  double frequency(std::int64_t value) const noexcept;
};

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

inline constexpr double kPValueFloor = 1e-12;

/// Upper tail of the chi-square law, floored at kPValueFloor.
double chi_square_p_value(double statistic, std::size_t dof);

/// Pearson goodness of fit against `expected` (value -> probability). The
/// expected support defines the categories; categories with expected count
/// below `min_expected` are pooled. Throws std::invalid_argument on an empty
/// histogram or on observations outside the expected support.
ChiSquare chi_square_gof(const Histogram& observed,
                         const std::map<std::int64_t, double>& expected,
                         double min_expected = 0.0);

/// Two-sample chi-square test of homogeneity; sparse categories (expected
/// count below `min_expected` in either sample) are pooled.
ChiSquare chi_square_homogeneity(const Histogram& a, const Histogram& b,
                                 double min_expected = 5.0);

/// Half the L1 distance between the normalized histogram and `pmf`,
/// restricted to the values in `support`.
double total_variation(const Histogram& observed, const std::map<std::int64_t, double>& pmf,
                       std::span<const std::int64_t> support);

/// Least-squares slope of log(value) against log(time).
double loglog_slope(std::span<const double> times, std::span<const double> values);

// ---------------------------------------------------------------------------
// Replicate orchestration.

struct SimulationOptions {
  std::uint64_t seed = 1;
  std::uint64_t experiment_id = 0;
  std::size_t threads = 1;
  ClockKind clock = ClockKind::Exponential;
  /// Polled between replicates; set it to stop early.
  const std::atomic<bool>* cancel = nullptr;
};

template <typename T>
struct ReplicateResults {
  std::vector<T> values;
  bool truncated = false;
};

/// Runs `work(rng, index)` for every replicate index with its own stream
/// Rng::stream(seed, experiment_id, index). Results are returned in index
/// order regardless of thread count. The first exception thrown by a
/// replicate is rethrown after the workers stop.
template <typename T, typename Work>
ReplicateResults<T> run_replicates(std::size_t replicates, const SimulationOptions& options,
                                   Work&& work) {
  std::vector<std::optional<T>> slots(replicates);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load() || (options.cancel && options.cancel->load())) return;
      const std::size_t index = next.fetch_add(1);
      if (index >= replicates) return;
      try {
        Rng rng = Rng::stream(options.seed, options.experiment_id, index);
        slots[index].emplace(work(rng, index));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, replicates));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  ReplicateResults<T> out;
  out.values.reserve(replicates);
  for (auto& slot : slots) {
    if (slot) out.values.push_back(std::move(*slot));
    else out.truncated = true;
  }
  return out;
}

/// Produces the meeting model for one replicate (fixed or freshly sampled).
using ModelSource = std::function<MeetingModel(Rng&)>;

ModelSource fixed_model(MeetingModel model);

/// Final solvent fraction |T|/n of the simple process.
EstimateCI estimate_density(const ModelSource& source, std::size_t replicates,
                            const SimulationOptions& options);

/// Mean absorption time of the simple process.
EstimateCI estimate_fixation_time(const MeetingModel& model, std::size_t replicates,
                                  const SimulationOptions& options);

struct WinnerDistribution {
  Histogram winners;
  /// Runs that ended with more than one solvent agent.
  std::size_t violations = 0;
};

WinnerDistribution winner_distribution(const MeetingModel& model, const MoneyState& init,
                                       std::size_t replicates,
                                       const SimulationOptions& options);

/// Empirical E[X_i(t) X_j(t)] at each time.
std::vector<EstimateCI> pair_moment_curve(const MeetingModel& model, AgentId i, AgentId j,
                                          std::span<const double> times,
                                          std::size_t replicates,
                                          const SimulationOptions& options);

struct FortuneDistribution {
  /// Fortune of the observed agent given that it is positive.
  Histogram conditional;
  /// P(fortune > 0) estimate.
  EstimateCI solvent;
};

FortuneDistribution conditional_fortune_hist(const ModelSource& source, AgentId agent,
                                             double t, std::size_t replicates,
                                             const SimulationOptions& options);

struct DecayCurve {
  std::vector<double> times;
  std::vector<EstimateCI> density;
  /// Fitted log-log slope over the window; empty if fewer than two points
  /// qualify.
  std::optional<double> slope;
  std::size_t window_points = 0;
};

DecayCurve density_decay_curve(const MeetingModel& model, std::span<const double> times,
                               std::size_t replicates, const SimulationOptions& options);

}  // namespace cg::stats
