#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cg/models.hpp"
#include "cg/rng.hpp"

namespace cg {

/// Law of the first meeting time of a pair. UniformTimeChange replaces the
/// Exponential(1) first meeting times by Uniform(0,1) ones through the
/// monotone map t -> 1 - exp(-t); it requires every rate to equal 1.
enum class ClockKind { Exponential, UniformTimeChange };

/// Maps an Exponential(1)-clock time to the uniform clock.
double to_uniform_clock(double exponential_time) noexcept;

struct MeetingEvent {
  double time = 0.0;
  AgentId i = 0;
  AgentId j = 0;
};

/// One first-meeting event per positive-rate pair, sorted by time with ties
/// broken by (i, j).
class FirstMeetingSchedule {
 public:
  FirstMeetingSchedule() = default;
  FirstMeetingSchedule(std::size_t agents, std::vector<MeetingEvent> events);

  std::size_t agent_count() const noexcept { return agents_; }
  std::span<const MeetingEvent> events() const noexcept { return events_; }

 private:
  std::size_t agents_ = 0;
  std::vector<MeetingEvent> events_;
};

using Money = std::uint64_t;

/// Integer fortunes with a conserved total.
class MoneyState {
 public:
  MoneyState() = default;

  /// Every agent starts with one unit.
  static MoneyState simple(std::size_t n);
  /// Standardized start x_i = weight_i / W; W = sum of weights must be > 0.
  static MoneyState weighted(std::vector<Money> weights);

  std::size_t size() const noexcept { return fortunes_.size(); }
  Money total() const noexcept { return total_; }
  Money operator[](AgentId i) const noexcept { return fortunes_[i]; }
  std::span<const Money> fortunes() const noexcept { return fortunes_; }
  double fraction(AgentId i) const noexcept {
    return static_cast<double>(fortunes_[i]) / static_cast<double>(total_);
  }
  bool solvent(AgentId i) const noexcept { return fortunes_[i] > 0; }
  std::size_t solvent_count() const noexcept;

  /// Moves the loser's whole fortune to the winner; returns the amount.
  Money transfer_all(AgentId loser, AgentId winner) noexcept;

  friend bool operator==(const MoneyState&, const MoneyState&) = default;

 private:
  explicit MoneyState(std::vector<Money> fortunes);

  std::vector<Money> fortunes_;
  Money total_ = 0;
};

/// Size-biased random ordering: rank[i] is agent i's position.
struct SizeBiasedOrder {
  std::vector<std::uint32_t> rank;

  bool precedes(AgentId a, AgentId b) const noexcept { return rank[a] < rank[b]; }
};

/// Token labels 1..n held by each agent, each set sorted ascending.
struct TokenState {
  std::vector<std::vector<std::uint32_t>> sets;

  friend bool operator==(const TokenState&, const TokenState&) = default;
};

struct TrajectoryEvent {
  double time = 0.0;
  AgentId winner = 0;
  AgentId loser = 0;
  Money transferred = 0;
};

struct RunResult {
  MoneyState final_state;
  std::vector<TrajectoryEvent> trajectory;
  std::vector<AgentId> solvent;
  double absorption_time = 0.0;
};

struct TokenRun {
  RunResult result;
  TokenState initial;
  TokenState final_tokens;
};

/// Raised when a run breaks conservation, permanence of bankruptcy,
/// anticlique absorption or token consistency.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FirstMeetingSchedule sample_schedule(const MeetingModel& model, ClockKind clock,
                                     Rng& rng);

/// Fair games: the winner of a meeting between solvent j and k is j with
/// probability x_j / (x_j + x_k), drawn as one exact integer.
RunResult run_direct(const FirstMeetingSchedule& schedule, const MoneyState& init,
                     Rng& rng);

/// Sequential size-biased ordering of the positive-weight agents; zero-weight
/// agents follow in index order.
SizeBiasedOrder size_biased_order(const MoneyState& init, Rng& rng);

/// The earlier agent in `order` wins every game it plays.
RunResult run_augmented(const FirstMeetingSchedule& schedule, const MoneyState& init,
                        const SizeBiasedOrder& order);

/// Simple process only: tokens 1..n are dealt uniformly and the holder of the
/// smallest token wins each game.
TokenRun run_token(const FirstMeetingSchedule& schedule, std::size_t n, Rng& rng);

/// Right-continuous N(t) as (time, count) steps starting at (0, n_initial).
std::vector<std::pair<double, std::size_t>> n_solvent_curve(const RunResult& result,
                                                            std::size_t n_initial);

/// Fortunes at time t (post-event value at an event time).
MoneyState fortunes_at(const RunResult& result, const MoneyState& init, double t);

/// X_i(t) * X_j(t), replayed from the trajectory.
Money pair_product_at(const RunResult& result, const MoneyState& init, AgentId i,
                      AgentId j, double t);

TokenState tokens_at(const TokenRun& run, double t);

/// Index of the last solvent agent when exactly one remains.
std::optional<AgentId> sole_winner(const RunResult& result);

/// Replays `result` against `init` and the model; throws InvariantViolation.
void verify_run(const MeetingModel& model, const MoneyState& init,
                const RunResult& result);

/// Token partition and size consistency at every event; throws
/// InvariantViolation.
void verify_tokens(const TokenRun& run);

}  // namespace cg
