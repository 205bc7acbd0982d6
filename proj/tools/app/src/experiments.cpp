#include "cg/app/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "cg/engine.hpp"
#include "cg/oracle.hpp"
#include "cg/solver.hpp"
#include "cg/stats.hpp"

namespace cg::app {
namespace {

using nlohmann::ordered_json;

/// Hands each replicate its meeting model: shared when the family is fixed,
/// sampled from the replicate's own stream when it is random.
class ModelProvider {
 public:
  explicit ModelProvider(const ModelSpec& spec) : spec_(spec) {
    if (is_random_family(spec.family)) {
      if (spec.family == "gw-poisson")
        offspring_ = std::make_shared<const GwOffspring>(GwOffspring::poisson(spec.real("mean")));
    } else {
      Rng unused(0);
      fixed_ = std::make_shared<const MeetingModel>(build_model(spec, unused));
    }
  }

  const MeetingModel* fixed() const noexcept { return fixed_.get(); }

  template <typename F>
  auto with(Rng& rng, F&& f) const {
    if (fixed_) return f(*fixed_);
    if (offspring_) {
      const MeetingModel m = galton_watson_tree(*offspring_, spec_.integer("depth"), rng);
      return f(m);
    }
    const MeetingModel m = build_model(spec_, rng);
    return f(m);
  }

 private:
  ModelSpec spec_;
  std::shared_ptr<const MeetingModel> fixed_;
  std::shared_ptr<const GwOffspring> offspring_;
};

RunResult simulate(const MeetingModel& model, const MoneyState& init, ClockKind clock,
                   Rng& rng) {
  const auto schedule = sample_schedule(model, clock, rng);
  RunResult result = run_direct(schedule, init, rng);
  verify_run(model, init, result);
  return result;
}

std::uint64_t experiment_id(const std::string& name) {
  const auto& names = registered_experiments();
  return static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

stats::SimulationOptions options_for(const ExperimentConfig& c, const std::atomic<bool>* cancel) {
  stats::SimulationOptions o;
  o.seed = c.seed;
  o.experiment_id = experiment_id(c.experiment);
  o.threads = c.threads;
  o.clock = c.clock;
  o.cancel = cancel;
  return o;
}

stats::EstimateCI column_estimate(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> column;
  column.reserve(rows.size());
  for (const auto& r : rows) column.push_back(r[k]);
  return stats::estimate(column);
}

std::string join(std::span<const Money> values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ' ';
    out += std::to_string(values[k]);
  }
  return out;
}

double oracle_time(ClockKind clock, double t) {
  return clock == ClockKind::UniformTimeChange ? t : to_uniform_clock(t);
}

// ---------------------------------------------------------------------------

ExperimentResult kingman(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const MeetingModel& model = *models.fixed();
  const MoneyState init = MoneyState::simple(model.size());
  auto runs = stats::run_replicates<std::vector<double>>(
      c.replicates, opts, [&](Rng& rng, std::size_t) {
        const auto result = simulate(model, init, c.clock, rng);
        std::vector<double> row{result.absorption_time};
        for (double t : c.times)
          row.push_back(static_cast<double>(fortunes_at(result, init, t).solvent_count()) /
                        static_cast<double>(model.size()));
        return row;
      });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  const auto fixation = column_estimate(runs.values, 0);
  const bool complete =
      model.size() >= 2 && model.all_pairs_positive() &&
      std::all_of(model.edges().begin(), model.edges().end(),
                  [&](const Edge& e) { return e.rate == model.min_rate(); });
  if (complete && c.clock == ClockKind::Exponential) {
    out.results["fixation_time"] =
        to_json(fixation, oracle::kingman_expected_fixation(model.size()) / model.min_rate());
  } else {
    out.results["fixation_time"] = to_json(fixation);
  }
  const auto bounds = oracle::mean_fixation_bounds(model);
  out.results["kingman_bound"] = bounds.kingman ? ordered_json(*bounds.kingman) : ordered_json();
  out.results["tree_bound"] = bounds.tree;

  // E N(t) * t * delta, reported without a bound.
  std::vector<stats::EstimateCI> density;
  ordered_json ratios = ordered_json::array();
  const double delta = model.min_rate();
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    density.push_back(column_estimate(runs.values, k + 1));
    const double count = density.back().mean * static_cast<double>(model.size());
    ratios.push_back({{"time", c.times[k]}, {"ratio", count * c.times[k] * delta}});
  }
  out.results["solvent_count_ratio"] = ratios;
  out.tables.push_back(curve_table("density", c.times, density));
  return out;
}

ExperimentResult winner_uniformity(const ExperimentConfig& c,
                                   const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const MeetingModel& model = *models.fixed();
  const MoneyState init =
      c.weights.empty() ? MoneyState::simple(model.size()) : MoneyState::weighted(c.weights);
  if (init.size() != model.size())
    throw ConfigError("weights must list one value per agent");
  auto runs = stats::run_replicates<std::int64_t>(c.replicates, opts, [&](Rng& rng, std::size_t) {
    const auto winner = sole_winner(simulate(model, init, c.clock, rng));
    return winner ? static_cast<std::int64_t>(*winner) : std::int64_t{-1};
  });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  stats::Histogram winners;
  std::size_t unresolved = 0;
  for (auto w : runs.values) {
    if (w < 0) ++unresolved;
    else winners.add(w);
  }
  std::map<std::int64_t, double> expected;
  for (AgentId a = 0; a < model.size(); ++a) expected[a] = init.fraction(a);

  Table table{"winners", {"agent", "frequency", "std_error", "expected"}, {}};
  ordered_json agents = ordered_json::array();
  for (AgentId a = 0; a < model.size(); ++a) {
    std::vector<double> hit;
    hit.reserve(runs.values.size());
    for (auto w : runs.values) hit.push_back(w == static_cast<std::int64_t>(a) ? 1.0 : 0.0);
    const auto e = stats::estimate(hit);
    agents.push_back(to_json(e, init.fraction(a)));
    table.rows.push_back({std::to_string(a), format_number(e.mean), format_number(e.std_error),
                          format_number(init.fraction(a))});
  }
  out.results["winner_frequencies"] = agents;
  out.results["unresolved_runs"] = unresolved;
  if (winners.total > 0)
    out.results["chi_square"] = to_json(stats::chi_square_gof(winners, expected, 5.0));
  out.tables.push_back(std::move(table));
  return out;
}

ExperimentResult pair_moment(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const MeetingModel& model = *models.fixed();
  if (model.size() < 2) throw ConfigError("pair-moment needs at least two agents");
  const MoneyState init = MoneyState::simple(model.size());
  const std::size_t m = c.times.size();
  auto runs = stats::run_replicates<std::vector<double>>(
      c.replicates, opts, [&](Rng& rng, std::size_t) {
        const auto result = simulate(model, init, c.clock, rng);
        std::vector<double> row;
        for (double t : c.times) {
          row.push_back(static_cast<double>(pair_product_at(result, init, 0, 1, t)));
          const auto x = static_cast<double>(fortunes_at(result, init, t)[0]);
          row.push_back(x * (x - 1.0));
        }
        return row;
      });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  Table products{"pair_product", {"time", "mean", "std_error", "n", "oracle", "z_score"}, {}};
  Table factorial{"factorial_moment", products.header, {}};
  ordered_json pj = ordered_json::array(), fj = ordered_json::array();
  for (std::size_t k = 0; k < m; ++k) {
    const double t = c.times[k];
    // Under the uniform clock, time t corresponds to exponential time -log(1-t).
    const double te = c.clock == ClockKind::Exponential ? t : -std::log1p(-t);
    const double op = oracle::pair_moment_exact(model.rate(0, 1), te);
    const double of = oracle::second_factorial_moment(model, 0, te);
    const auto ep = column_estimate(runs.values, 2 * k);
    const auto ef = column_estimate(runs.values, 2 * k + 1);
    auto pe = to_json(ep, op);
    pe["time"] = t;
    pj.push_back(pe);
    auto fe = to_json(ef, of);
    fe["time"] = t;
    fj.push_back(fe);
    products.rows.push_back({format_number(t), format_number(ep.mean), format_number(ep.std_error),
                             std::to_string(ep.n_replicates), format_number(op),
                             format_number(ep.z_score(op))});
    factorial.rows.push_back({format_number(t), format_number(ef.mean), format_number(ef.std_error),
                              std::to_string(ef.n_replicates), format_number(of),
                              format_number(ef.z_score(of))});
  }
  out.results["pair_product"] = pj;
  out.results["factorial_moment"] = fj;
  out.tables.push_back(std::move(products));
  out.tables.push_back(std::move(factorial));
  return out;
}

/// Sorted-descending fortune multiset in base (n+1), then the winner (n when
/// the run did not end with a single solvent agent).
std::int64_t joint_key(const MoneyState& at_t, const RunResult& result, std::size_t n) {
  std::vector<Money> f(at_t.fortunes().begin(), at_t.fortunes().end());
  std::sort(f.begin(), f.end(), std::greater<>());
  std::int64_t key = 0;
  for (Money x : f) key = key * static_cast<std::int64_t>(n + 1) + static_cast<std::int64_t>(x);
  const auto w = sole_winner(result);
  return key * static_cast<std::int64_t>(n + 1) + static_cast<std::int64_t>(w ? *w : n);
}

std::string joint_label(std::int64_t key, std::size_t n) {
  const auto base = static_cast<std::int64_t>(n + 1);
  const std::int64_t winner = key % base;
  key /= base;
  std::vector<Money> f(n);
  for (std::size_t k = n; k-- > 0;) {
    f[k] = static_cast<Money>(key % base);
    key /= base;
  }
  return "{" + join(f) + "} winner " +
         (winner == static_cast<std::int64_t>(n) ? std::string("none") : std::to_string(winner));
}

ExperimentResult construction_equivalence(const ExperimentConfig& c,
                                          const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const MeetingModel& model = *models.fixed();
  const std::size_t n = model.size();
  const MoneyState init = MoneyState::simple(n);
  const double t = c.times.front();
  auto runs = stats::run_replicates<std::array<std::int64_t, 3>>(
      c.replicates, opts, [&](Rng& rng, std::size_t) {
        const auto schedule = sample_schedule(model, c.clock, rng);
        const auto direct = run_direct(schedule, init, rng);
        verify_run(model, init, direct);
        const auto order = size_biased_order(init, rng);
        const auto augmented = run_augmented(schedule, init, order);
        verify_run(model, init, augmented);
        const auto token = run_token(schedule, n, rng);
        verify_run(model, init, token.result);
        verify_tokens(token);
        return std::array<std::int64_t, 3>{
            joint_key(fortunes_at(direct, init, t), direct, n),
            joint_key(fortunes_at(augmented, init, t), augmented, n),
            joint_key(fortunes_at(token.result, init, t), token.result, n)};
      });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  const std::array<const char*, 3> names{"direct", "augmented", "token"};
  std::array<stats::Histogram, 3> hist;
  for (const auto& keys : runs.values)
    for (std::size_t k = 0; k < 3; ++k) hist[k].add(keys[k]);
  ordered_json pairs = ordered_json::array();
  double min_p = 1.0;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      const auto test = stats::chi_square_homogeneity(hist[a], hist[b]);
      auto j = to_json(test);
      j["a"] = names[a];
      j["b"] = names[b];
      pairs.push_back(j);
      min_p = std::min(min_p, test.p_value);
    }
  }
  std::map<std::int64_t, bool> categories;
  for (const auto& h : hist)
    for (const auto& [key, count] : h.bins) categories[key] = true;
  Table table{"joint_law", {"category", "direct", "augmented", "token"}, {}};
  for (const auto& [key, unused] : categories)
    table.rows.push_back({joint_label(key, n), std::to_string(hist[0].count(key)),
                          std::to_string(hist[1].count(key)), std::to_string(hist[2].count(key))});
  out.results["time"] = t;
  out.results["categories"] = categories.size();
  out.results["pairs"] = pairs;
  out.results["min_p_value"] = min_p;
  out.tables.push_back(std::move(table));
  return out;
}

stats::ReplicateResults<double> final_density(const ExperimentConfig& c,
                                              const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  return stats::run_replicates<double>(c.replicates, opts, [&](Rng& rng, std::size_t) {
    return models.with(rng, [&](const MeetingModel& model) {
      const MoneyState init = MoneyState::simple(model.size());
      const auto result = simulate(model, init, c.clock, rng);
      return static_cast<double>(result.solvent.size()) / static_cast<double>(model.size());
    });
  });
}

ExperimentResult er_density(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  auto runs = final_density(c, opts);
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;
  const auto e = stats::estimate(runs.values);
  const double target = oracle::er_limit_density(c.model.real("c"));
  out.results["density"] = to_json(e, target);
  out.results["abs_error"] = std::abs(e.mean - target);
  return out;
}

ExperimentResult rtree_density(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  const std::size_t r = c.model.integer("r");
  if (r < 3) throw ConfigError("rtree-density needs r >= 3");
  auto runs = final_density(c, opts);
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  const solver::Grid grid;
  const auto star = solver::solve_r_regular(r, grid);
  const auto inner = solver::solve_dary_fixed_point(r - 1, grid);
  const std::size_t last = grid.t_points() - 1;
  const double phi_star = star.phi(0, last);
  const double upper = inner.phi(0, last);
  const double lower = (1.0 - oracle::epsilon_d(r - 1)) * upper;
  const auto e = stats::estimate(runs.values);
  out.results["density"] = to_json(e, phi_star);
  out.results["abs_error"] = std::abs(e.mean - phi_star);
  ordered_json s;
  s["phi_star"] = phi_star;
  s["lower"] = lower;
  s["upper"] = upper;
  s["z_points"] = grid.z_points;
  s["t_step"] = grid.t_step;
  out.results["solver"] = s;
  return out;
}

ExperimentResult near_clique_bounds(const ExperimentConfig& c,
                                    const stats::SimulationOptions& opts) {
  auto runs = final_density(c, opts);
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;
  const auto e = stats::estimate(runs.values);
  const auto bounds = oracle::near_clique_density_bounds(c.model.integer("r"));
  out.results["density"] = to_json(e);
  out.results["lower"] = bounds.lower;
  out.results["upper"] = bounds.upper;
  out.results["within"] = e.mean >= bounds.lower - 3.0 * e.std_error &&
                          e.mean <= bounds.upper + 3.0 * e.std_error;
  return out;
}

ExperimentResult pgw_geometric(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const double t = c.times.front();
  auto runs = stats::run_replicates<Money>(c.replicates, opts, [&](Rng& rng, std::size_t) {
    return models.with(rng, [&](const MeetingModel& model) {
      const MoneyState init = MoneyState::simple(model.size());
      const auto result = simulate(model, init, c.clock, rng);
      return fortunes_at(result, init, t)[0];
    });
  });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  const double mean = c.model.real("mean");
  const double u = oracle_time(c.clock, t);
  std::vector<double> solvent;
  stats::Histogram conditional;
  for (Money x : runs.values) {
    solvent.push_back(x > 0 ? 1.0 : 0.0);
    if (x > 0) conditional.add(static_cast<std::int64_t>(x));
  }
  const auto e = stats::estimate(solvent);
  out.results["solvent"] = to_json(e, oracle::pgw_solvent_prob(mean, u));

  std::map<std::int64_t, double> pmf;
  std::vector<std::int64_t> support;
  Table table{"root_fortune", {"fortune", "frequency", "oracle"}, {}};
  for (std::int64_t k = 1; k <= 10; ++k) {
    pmf[k] = oracle::pgw_conditional_pmf(mean, u, static_cast<std::size_t>(k));
    support.push_back(k);
    table.rows.push_back({std::to_string(k), format_number(conditional.frequency(k)),
                          format_number(pmf[k])});
  }
  out.results["conditional_samples"] = conditional.total;
  out.results["conditional_tv"] =
      conditional.total > 0 ? ordered_json(stats::total_variation(conditional, pmf, support))
                            : ordered_json();
  out.tables.push_back(std::move(table));
  return out;
}

ExperimentResult torus_exponent(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const MeetingModel& model = *models.fixed();
  const MoneyState init = MoneyState::simple(model.size());
  auto runs = stats::run_replicates<std::vector<double>>(
      c.replicates, opts, [&](Rng& rng, std::size_t) {
        const auto result = simulate(model, init, c.clock, rng);
        const auto steps = n_solvent_curve(result, model.size());
        std::vector<double> row;
        for (double t : c.times) {
          auto it = std::upper_bound(steps.begin(), steps.end(), t,
                                     [](double v, const auto& s) { return v < s.first; });
          row.push_back(static_cast<double>(std::prev(it)->second) /
                        static_cast<double>(model.size()));
        }
        return row;
      });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  std::vector<stats::EstimateCI> density;
  std::vector<double> wt, wv;
  const auto n = static_cast<double>(model.size());
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    density.push_back(column_estimate(runs.values, k));
    const double rho = density.back().mean;
    if (c.times[k] > 0.0 && rho <= 0.9 && rho * n >= 10.0) {
      wt.push_back(c.times[k]);
      wv.push_back(rho);
    }
  }
  const double heuristic =
      -static_cast<double>(c.model.integer("dim")) / c.model.real("alpha");
  out.results["slope"] = wt.size() >= 2 ? ordered_json(stats::loglog_slope(wt, wv)) : ordered_json();
  out.results["heuristic_slope"] = heuristic;
  out.results["window_points"] = wt.size();
  out.results["gated"] = false;
  out.tables.push_back(curve_table("density", c.times, density));
  return out;
}

/// Token-to-agent assignment as a base-n number, token 1 in the lowest digit.
std::int64_t assignment_code(const TokenState& tokens, std::size_t n) {
  std::vector<std::int64_t> owner(n, 0);
  for (std::size_t a = 0; a < tokens.sets.size(); ++a)
    for (auto tok : tokens.sets[a]) owner[tok - 1] = static_cast<std::int64_t>(a);
  std::int64_t code = 0;
  for (std::size_t k = n; k-- > 0;) code = code * static_cast<std::int64_t>(n) + owner[k];
  return code;
}

std::int64_t vector_code(std::span<const Money> fortunes, std::size_t n) {
  std::int64_t code = 0;
  for (Money x : fortunes) code = code * static_cast<std::int64_t>(n + 1) + static_cast<std::int64_t>(x);
  return code;
}

std::vector<Money> decode_vector(std::int64_t code, std::size_t n) {
  std::vector<Money> out(n);
  for (std::size_t k = n; k-- > 0;) {
    out[k] = static_cast<Money>(code % static_cast<std::int64_t>(n + 1));
    code /= static_cast<std::int64_t>(n + 1);
  }
  return out;
}

std::string assignment_label(std::int64_t code, std::size_t n) {
  std::vector<std::vector<int>> sets(n);
  for (std::size_t tok = 1; tok <= n; ++tok) {
    sets[static_cast<std::size_t>(code % static_cast<std::int64_t>(n))].push_back(static_cast<int>(tok));
    code /= static_cast<std::int64_t>(n);
  }
  std::string out;
  for (std::size_t a = 0; a < n; ++a) {
    if (a > 0) out += ' ';
    out += '{';
    for (std::size_t k = 0; k < sets[a].size(); ++k) {
      if (k > 0) out += ',';
      out += std::to_string(sets[a][k]);
    }
    out += '}';
  }
  return out;
}

/// All assignments of tokens 1..n to agents with the given set sizes.
std::vector<std::int64_t> partitions_for(std::span<const Money> sizes) {
  const std::size_t n = sizes.size();
  std::vector<std::int64_t> labels;
  for (std::size_t a = 0; a < n; ++a)
    for (Money k = 0; k < sizes[a]; ++k) labels.push_back(static_cast<std::int64_t>(a));
  std::vector<std::int64_t> codes;
  do {
    std::int64_t code = 0;
    for (std::size_t k = labels.size(); k-- > 0;) code = code * static_cast<std::int64_t>(n) + labels[k];
    codes.push_back(code);
  } while (std::next_permutation(labels.begin(), labels.end()));
  return codes;
}

ExperimentResult exchangeability(const ExperimentConfig& c, const stats::SimulationOptions& opts) {
  const ModelProvider models(c.model);
  const MeetingModel& model = *models.fixed();
  const std::size_t n = model.size();
  const double t = c.times.front();
  std::vector<Money> target = c.pattern;
  std::sort(target.begin(), target.end());
  using Sample = std::optional<std::pair<std::int64_t, std::int64_t>>;
  auto runs = stats::run_replicates<Sample>(c.replicates, opts, [&](Rng& rng, std::size_t) -> Sample {
    const auto schedule = sample_schedule(model, c.clock, rng);
    const auto token = run_token(schedule, n, rng);
    verify_run(model, MoneyState::simple(n), token.result);
    verify_tokens(token);
    const auto tokens = tokens_at(token, t);
    std::vector<Money> sizes;
    for (const auto& s : tokens.sets) sizes.push_back(s.size());
    std::vector<Money> sorted = sizes;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != target) return std::nullopt;
    return std::pair{vector_code(sizes, n), assignment_code(tokens, n)};
  });
  ExperimentResult out;
  out.truncated = runs.truncated;
  out.replicates_completed = runs.values.size();
  if (runs.values.empty()) return out;

  std::map<std::int64_t, stats::Histogram> strata;
  std::size_t conditioned = 0;
  for (const auto& s : runs.values) {
    if (!s) continue;
    ++conditioned;
    strata[s->first].add(s->second);
  }
  Table table{"assignments", {"fortunes", "tokens", "count", "expected"}, {}};
  ordered_json per = ordered_json::array();
  double statistic = 0.0;
  std::size_t dof = 0;
  for (const auto& [stratum, hist] : strata) {
    const auto sizes = decode_vector(stratum, n);
    const auto codes = partitions_for(sizes);
    std::map<std::int64_t, double> uniform;
    for (auto code : codes) uniform[code] = 1.0 / static_cast<double>(codes.size());
    const auto test = stats::chi_square_gof(hist, uniform, 5.0);
    statistic += test.statistic;
    dof += test.dof;
    auto j = to_json(test);
    j["fortunes"] = sizes;
    j["samples"] = hist.total;
    j["partitions"] = codes.size();
    per.push_back(j);
    const double expected = static_cast<double>(hist.total) / static_cast<double>(codes.size());
    for (auto code : codes)
      table.rows.push_back({join(sizes), assignment_label(code, n), std::to_string(hist.count(code)),
                            format_number(expected)});
  }
  const stats::ChiSquare combined{statistic, dof, stats::chi_square_p_value(statistic, dof)};
  out.results["time"] = t;
  out.results["conditioned_runs"] = conditioned;
  out.results["strata"] = per;
  out.results["chi_square"] = to_json(combined);
  out.tables.push_back(std::move(table));
  return out;
}

}  // namespace

std::string version_string() { return CG_VERSION; }

ExperimentResult run_experiment(const ExperimentConfig& config, const std::atomic<bool>* cancel) {
  validate(config);
  const auto opts = options_for(config, cancel);
  const std::string& e = config.experiment;
  if (e == "kingman") return kingman(config, opts);
  if (e == "winner-uniformity") return winner_uniformity(config, opts);
  if (e == "pair-moment") return pair_moment(config, opts);
  if (e == "construction-equivalence") return construction_equivalence(config, opts);
  if (e == "er-density") return er_density(config, opts);
  if (e == "rtree-density") return rtree_density(config, opts);
  if (e == "near-clique-bounds") return near_clique_bounds(config, opts);
  if (e == "pgw-geometric") return pgw_geometric(config, opts);
  if (e == "torus-exponent") return torus_exponent(config, opts);
  if (e == "exchangeability") return exchangeability(config, opts);
  throw ConfigError("unknown experiment '" + e + "'");
}

nlohmann::ordered_json summary_json(const ExperimentConfig& config,
                                    const ExperimentResult& result) {
  ordered_json out;
  out["version"] = version_string();
  out["config"] = to_json(config);
  out["truncated"] = result.truncated;
  out["replicates_completed"] = result.replicates_completed;
  out["results"] = result.results.is_null() ? ordered_json::object() : result.results;
  return out;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  const auto& dir = config.output_dir;
  write_text_file(dir / (config.experiment + ".json"), dump_json(summary_json(config, result)));
  for (const auto& table : result.tables) {
    std::ostringstream csv;
    write_csv(csv, table);
    if (result.truncated) csv << "# truncated: true\r\n";
    write_text_file(dir / (config.experiment + "_" + table.name + ".csv"), csv.str());
  }
}

}  // namespace cg::app
