#include "cg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cg {

namespace {

bool event_less(const MeetingEvent& a, const MeetingEvent& b) noexcept {
  if (a.time != b.time) return a.time < b.time;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

void check(bool condition, const std::string& message) {
  if (!condition) throw InvariantViolation(message);
}

// Common driver: scans the schedule and asks `pick_winner(j, k)` for every
// meeting between two solvent agents.
template <typename PickWinner>
RunResult play(const FirstMeetingSchedule& schedule, const MoneyState& init,
               PickWinner&& pick_winner) {
  if (schedule.agent_count() != init.size())
    throw std::invalid_argument("schedule and initial state disagree on n");
  RunResult out;
  out.final_state = init;
  MoneyState& state = out.final_state;
  std::size_t solvent = state.solvent_count();
  for (const auto& event : schedule.events()) {
    if (solvent <= 1) break;
    if (!state.solvent(event.i) || !state.solvent(event.j)) continue;
    const AgentId winner = pick_winner(event.i, event.j, state);
    const AgentId loser = (winner == event.i) ? event.j : event.i;
    const Money amount = state.transfer_all(loser, winner);
    out.trajectory.push_back({event.time, winner, loser, amount});
    --solvent;
  }
  for (AgentId a = 0; a < state.size(); ++a)
    if (state.solvent(a)) out.solvent.push_back(a);
  out.absorption_time = out.trajectory.empty() ? 0.0 : out.trajectory.back().time;
  return out;
}

}  // namespace

double to_uniform_clock(double exponential_time) noexcept {
  return -std::expm1(-exponential_time);
}

FirstMeetingSchedule::FirstMeetingSchedule(std::size_t agents,
                                           std::vector<MeetingEvent> events)
    : agents_(agents), events_(std::move(events)) {
  for (auto& e : events_) {
    if (e.i >= agents_ || e.j >= agents_ || e.i == e.j)
      throw std::invalid_argument("schedule event has invalid endpoints");
    if (!(e.time >= 0.0)) throw std::invalid_argument("schedule times must be >= 0");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(events_.begin(), events_.end(), event_less);
}

MoneyState::MoneyState(std::vector<Money> fortunes) : fortunes_(std::move(fortunes)) {
  total_ = std::accumulate(fortunes_.begin(), fortunes_.end(), Money{0});
}

MoneyState MoneyState::simple(std::size_t n) {
  if (n == 0) throw std::invalid_argument("need at least one agent");
  return MoneyState(std::vector<Money>(n, 1));
}

MoneyState MoneyState::weighted(std::vector<Money> weights) {
  MoneyState state(std::move(weights));
  if (state.size() == 0 || state.total_ == 0)
    throw std::invalid_argument("weights must have a positive total");
  return state;
}

std::size_t MoneyState::solvent_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(fortunes_.begin(), fortunes_.end(), [](Money m) { return m > 0; }));
}

Money MoneyState::transfer_all(AgentId loser, AgentId winner) noexcept {
  const Money amount = fortunes_[loser];
  fortunes_[winner] += amount;
  fortunes_[loser] = 0;
  return amount;
}

FirstMeetingSchedule sample_schedule(const MeetingModel& model, ClockKind clock,
                                     Rng& rng) {
  if (clock == ClockKind::UniformTimeChange && !model.all_rates_equal_one())
    throw std::invalid_argument("uniform time change requires all rates equal to 1");
  std::vector<MeetingEvent> events;
  events.reserve(model.edge_count());
  for (const auto& e : model.edges()) {
    const double time = (clock == ClockKind::Exponential) ? rng.exponential(e.rate)
                                                          : rng.uniform01();
    events.push_back({time, e.i, e.j});
  }
  return FirstMeetingSchedule(model.size(), std::move(events));
}

RunResult run_direct(const FirstMeetingSchedule& schedule, const MoneyState& init,
                     Rng& rng) {
  return play(schedule, init, [&rng](AgentId j, AgentId k, const MoneyState& state) {
    return rng.below(state[j] + state[k]) < state[j] ? j : k;
  });
}

SizeBiasedOrder size_biased_order(const MoneyState& init, Rng& rng) {
  const std::size_t n = init.size();
  if (n == 0 || init.total() == 0)
    throw std::invalid_argument("size-biased order needs a positive weight");

  // Fenwick tree over the remaining weights: draw one integer in
  // [0, remaining), locate its owner, remove it.
  std::vector<Money> tree(n + 1, 0);
  auto add = [&](std::size_t idx, Money delta, bool subtract) {
    for (++idx; idx <= n; idx += idx & (~idx + 1))
      tree[idx] = subtract ? tree[idx] - delta : tree[idx] + delta;
  };
  std::size_t positive = 0;
  for (AgentId a = 0; a < n; ++a) {
    if (init[a] > 0) {
      add(a, init[a], false);
      ++positive;
    }
  }
  std::size_t top = 1;
  while (top * 2 <= n) top *= 2;

  SizeBiasedOrder order;
  order.rank.assign(n, 0);
  Money remaining = init.total();
  for (std::uint32_t position = 0; position < positive; ++position) {
    Money target = rng.below(remaining);
    std::size_t idx = 0;
    for (std::size_t step = top; step > 0; step /= 2) {
      if (idx + step <= n && tree[idx + step] <= target) {
        idx += step;
        target -= tree[idx];
      }
    }
    const auto agent = static_cast<AgentId>(idx);
    order.rank[agent] = position;
    add(agent, init[agent], true);
    remaining -= init[agent];
  }
  auto next = static_cast<std::uint32_t>(positive);
  for (AgentId a = 0; a < n; ++a)
    if (init[a] == 0) order.rank[a] = next++;
  return order;
}

RunResult run_augmented(const FirstMeetingSchedule& schedule, const MoneyState& init,
                        const SizeBiasedOrder& order) {
  if (order.rank.size() != init.size())
    throw std::invalid_argument("order and initial state disagree on n");
  return play(schedule, init, [&order](AgentId j, AgentId k, const MoneyState&) {
    return order.precedes(j, k) ? j : k;
  });
}

TokenRun run_token(const FirstMeetingSchedule& schedule, std::size_t n, Rng& rng) {
  TokenRun run;
  std::vector<std::uint32_t> deal(n);
  std::iota(deal.begin(), deal.end(), std::uint32_t{1});
  for (std::size_t k = n; k > 1; --k) std::swap(deal[k - 1], deal[rng.below(k)]);
  run.initial.sets.resize(n);
  for (std::size_t a = 0; a < n; ++a) run.initial.sets[a] = {deal[a]};

  // A winner already holds the smaller minimum, so each solvent agent's
  // minimum token is its initial token; merging can wait until after the scan.
  const auto& dealt = run.initial.sets;
  run.result = play(schedule, MoneyState::simple(n),
                    [&dealt](AgentId j, AgentId k, const MoneyState&) {
                      return dealt[j].front() < dealt[k].front() ? j : k;
                    });
  run.final_tokens = run.initial;
  auto& sets = run.final_tokens.sets;
  for (const auto& ev : run.result.trajectory) {
    std::vector<std::uint32_t> merged;
    merged.reserve(sets[ev.winner].size() + sets[ev.loser].size());
    std::merge(sets[ev.winner].begin(), sets[ev.winner].end(), sets[ev.loser].begin(),
               sets[ev.loser].end(), std::back_inserter(merged));
    sets[ev.winner] = std::move(merged);
    sets[ev.loser].clear();
  }
  return run;
}

std::vector<std::pair<double, std::size_t>> n_solvent_curve(const RunResult& result,
                                                            std::size_t n_initial) {
  std::vector<std::pair<double, std::size_t>> curve;
  curve.reserve(result.trajectory.size() + 1);
  curve.emplace_back(0.0, n_initial);
  std::size_t count = n_initial;
  for (const auto& ev : result.trajectory) curve.emplace_back(ev.time, --count);
  return curve;
}

MoneyState fortunes_at(const RunResult& result, const MoneyState& init, double t) {
  MoneyState state = init;
  for (const auto& ev : result.trajectory) {
    if (ev.time > t) break;
    state.transfer_all(ev.loser, ev.winner);
  }
  return state;
}

Money pair_product_at(const RunResult& result, const MoneyState& init, AgentId i,
                      AgentId j, double t) {
  Money xi = init[i], xj = init[j];
  for (const auto& ev : result.trajectory) {
    if (ev.time > t) break;
    if (ev.winner == i) xi += ev.transferred;
    if (ev.winner == j) xj += ev.transferred;
    if (ev.loser == i) xi = 0;
    if (ev.loser == j) xj = 0;
  }
  return xi * xj;
}

TokenState tokens_at(const TokenRun& run, double t) {
  TokenState state = run.initial;
  auto& sets = state.sets;
  for (const auto& ev : run.result.trajectory) {
    if (ev.time > t) break;
    auto& into = sets[ev.winner];
    into.insert(into.end(), sets[ev.loser].begin(), sets[ev.loser].end());
    std::inplace_merge(into.begin(),
                       into.end() - static_cast<std::ptrdiff_t>(sets[ev.loser].size()),
                       into.end());
    sets[ev.loser].clear();
  }
  return state;
}

std::optional<AgentId> sole_winner(const RunResult& result) {
  if (result.solvent.size() != 1) return std::nullopt;
  return result.solvent.front();
}

void verify_run(const MeetingModel& model, const MoneyState& init,
                const RunResult& result) {
  check(model.size() == init.size(), "model and initial state disagree on n");
  std::vector<Money> x(init.fortunes().begin(), init.fortunes().end());
  double last_time = 0.0;
  for (std::size_t k = 0; k < result.trajectory.size(); ++k) {
    const auto& ev = result.trajectory[k];
    const std::string where = "event " + std::to_string(k) + ": ";
    check(ev.winner < x.size() && ev.loser < x.size(), where + "agent out of range");
    check(ev.winner != ev.loser, where + "winner equals loser");
    check(ev.time >= last_time, where + "trajectory times decrease");
    check(model.rate(ev.winner, ev.loser) > 0.0, where + "zero-rate pair played");
    check(x[ev.winner] > 0 && x[ev.loser] > 0,
          where + "bankrupt agent re-entered play");
    check(ev.transferred == x[ev.loser], where + "transfer differs from loser fortune");
    const Money before = x[ev.winner] + x[ev.loser];
    x[ev.winner] += x[ev.loser];
    x[ev.loser] = 0;
    check(x[ev.winner] == before, where + "money not conserved");
    last_time = ev.time;
  }
  check(std::accumulate(x.begin(), x.end(), Money{0}) == init.total(),
        "final total differs from initial total");
  check(std::equal(x.begin(), x.end(), result.final_state.fortunes().begin(),
                   result.final_state.fortunes().end()),
        "final fortunes disagree with trajectory replay");
  std::vector<AgentId> solvent;
  for (AgentId a = 0; a < x.size(); ++a)
    if (x[a] > 0) solvent.push_back(a);
  check(solvent == result.solvent, "solvent set disagrees with final fortunes");
  check(solvent.size() + result.trajectory.size() == init.solvent_count(),
        "solvent count does not drop by one per game");
  for (const auto& e : model.edges())
    check(x[e.i] == 0 || x[e.j] == 0, "final solvent set is not an anticlique (" +
                                          std::to_string(e.i) + "," +
                                          std::to_string(e.j) + ")");
  const double expected_time =
      result.trajectory.empty() ? 0.0 : result.trajectory.back().time;
  check(result.absorption_time == expected_time,
        "absorption time differs from last event time");
}

void verify_tokens(const TokenRun& run) {
  const std::size_t n = run.initial.sets.size();
  auto partition_ok = [n](const TokenState& s) {
    std::vector<bool> seen(n + 1, false);
    std::size_t count = 0;
    for (const auto& set : s.sets) {
      if (!std::is_sorted(set.begin(), set.end())) return false;
      for (auto token : set) {
        if (token < 1 || token > n || seen[token]) return false;
        seen[token] = true;
        ++count;
      }
    }
    return count == n;
  };
  check(run.initial.sets.size() == run.result.final_state.size(),
        "token state and money state disagree on n");
  check(partition_ok(run.initial), "initial tokens are not a partition of 1..n");
  std::vector<std::size_t> sizes(n);
  std::vector<std::uint32_t> minimum(n);
  for (std::size_t a = 0; a < n; ++a) {
    check(run.initial.sets[a].size() == 1, "simple start needs one token each");
    sizes[a] = 1;
    minimum[a] = run.initial.sets[a].front();
  }
  for (std::size_t k = 0; k < run.result.trajectory.size(); ++k) {
    const auto& ev = run.result.trajectory[k];
    const std::string where = "token event " + std::to_string(k) + ": ";
    check(sizes[ev.winner] > 0 && sizes[ev.loser] > 0, where + "empty set played");
    check(minimum[ev.winner] < minimum[ev.loser],
          where + "winner does not hold the smallest token");
    check(ev.transferred == sizes[ev.loser], where + "transfer differs from set size");
    sizes[ev.winner] += sizes[ev.loser];
    sizes[ev.loser] = 0;
  }
  check(partition_ok(run.final_tokens), "final tokens are not a partition of 1..n");
  for (std::size_t a = 0; a < n; ++a) {
    check(run.final_tokens.sets[a].size() == sizes[a], "set size disagrees with replay");
    check(run.final_tokens.sets[a].size() == run.result.final_state[a],
          "set size disagrees with fortune");
  }
}

}  // namespace cg
