#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cg/app/commands.hpp"
#include "cg/app/config.hpp"
#include "cg/app/experiments.hpp"
#include "cg/app/output.hpp"
#include "cg/app/validation.hpp"
#include "cg/engine.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_cancel{false};

extern "C" void on_signal(int) { g_cancel.store(true); }

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
  std::optional<std::string> config;
};

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const cg::app::ConfigError& e) {
    std::cerr << "cgsim: invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const cg::InvariantViolation& e) {
    std::cerr << "cgsim: invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "cgsim: invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::length_error& e) {
    std::cerr << "cgsim: invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "cgsim: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_simulate(const Globals& g, const std::string& experiment,
                 const std::vector<std::string>& overrides) {
  using namespace cg::app;
  ExperimentConfig config;
  if (g.config) {
    config = load_config(*g.config);
    if (!experiment.empty() && experiment != config.experiment)
      throw ConfigError("experiment '" + experiment + "' does not match the config file ('" +
                        config.experiment + "')");
  } else {
    if (experiment.empty()) throw ConfigError("name an experiment or pass --config");
    config = default_config(experiment);
  }
  for (const auto& o : overrides) apply_override(config, o);
  if (g.seed) config.seed = *g.seed;
  if (g.threads) config.threads = *g.threads;
  if (g.out) config.output_dir = *g.out;
  validate(config);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto result = run_experiment(config, &g_cancel);
  write_outputs(config, result);
  std::cout << dump_json(summary_json(config, result));
  return result.truncated ? kExitInterrupted : 0;
}

/// Flags given on the command line win over the config file.
struct SolveFlags {
  cg::app::SolveConfig values;
  std::vector<std::pair<CLI::Option*, std::function<void(cg::app::SolveConfig&)>>> setters;
};

int cmd_solve(const Globals& g, const SolveFlags& flags) {
  using namespace cg::app;
  SolveConfig config = flags.values;
  if (g.config) {
    std::ifstream in(*g.config);
    if (!in) throw ConfigError("cannot open config file " + *g.config);
    config = parse_solve_config(in);
    for (const auto& [option, apply] : flags.setters)
      if (*option) apply(config);
  }
  if (g.out) config.output_dir = *g.out;
  validate(config);
  const auto output = run_solve(config);
  write_outputs(config, output);
  std::cout << dump_json(output.summary);
  return 0;
}

int cmd_oracle(const std::string& name, const std::vector<std::string>& params) {
  using namespace cg::app;
  std::cout << evaluate_oracle(name, parse_assignments(params)).dump() << "\n";
  return 0;
}

int cmd_validate(const Globals& g, const std::string& suite, double budget,
                 std::optional<int> tamper, const std::vector<int>& only,
                 const std::string& report_path) {
  using namespace cg::app;
  ValidationOptions options;
  options.suite = parse_suite(suite);
  if (g.seed) options.seed = *g.seed;
  if (g.threads) options.threads = *g.threads;
  options.tamper = tamper;
  options.only = only;
  options.cancel = &g_cancel;
  options.on_result = [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  const auto start = std::chrono::steady_clock::now();
  const auto report = run_validation(options);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string path = report_path;
  if (path.empty() && g.out) path = (std::filesystem::path(*g.out) / "validation.json").string();
  if (!path.empty()) write_text_file(path, dump_json(report.to_json()));

  bool ok = report.passed();
  for (const auto& c : report.criteria)
    if (!c.passed) std::cout << "failing criterion: " << c.id << " " << c.name << "\n";
  if (budget > 0.0 && elapsed > budget) {
    std::cout << "FAIL  budget: " << format_number(elapsed) << " s exceeds " << format_number(budget)
              << " s\n";
    ok = false;
  }
  std::cout << (ok ? "validation passed" : "validation failed") << " (" << suite << " suite, "
            << format_number(std::round(elapsed)) << " s)\n";
  return ok ? 0 : kExitFailure;
}

int cmd_model_gen(const Globals& g, const std::string& family,
                  const std::vector<std::string>& params, const std::string& file) {
  using namespace cg::app;
  ModelSpec spec = default_model(family);
  ExperimentConfig holder;
  for (const auto& [key, value] : parse_assignments(params)) {
    holder.model = spec;
    apply_override(holder, "model." + key + "=" + value);
    spec = holder.model;
  }
  cg::Rng rng = cg::Rng::stream(g.seed.value_or(1), 1000, 0);
  const auto model = build_model(spec, rng);
  std::string path = file;
  if (path.empty() && g.out) path = (std::filesystem::path(*g.out) / (family + ".edges")).string();
  if (path.empty()) {
    cg::write_edge_list(std::cout, model);
  } else {
    std::ostringstream text;
    cg::write_edge_list(text, model);
    write_text_file(path, text.str());
    std::cerr << "wrote " << model.size() << " agents, " << model.edge_count() << " edges to "
              << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compulsive Gambler process simulator, solver and validation suite", "cgsim"};
  app.set_version_flag("--version", cg::app::version_string());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out, config;
  auto* seed_opt = app.add_option("--seed", seed, "Base seed for every random stream");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads (results do not depend on it)")
          ->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "Output directory");
  auto* config_opt = app.add_option("--config", config, "Configuration file")->check(CLI::ExistingFile);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a registered experiment");
  std::string experiment;
  std::vector<std::string> sim_overrides;
  simulate->add_option("experiment", experiment, "Experiment name");
  simulate->add_option("--set", sim_overrides, "Override, e.g. replicates=500 or model.n=40")
      ->take_all();
  simulate->add_flag_callback("--list", [] {
    for (const auto& name : cg::app::registered_experiments()) std::cout << name << "\n";
    std::exit(0);
  }, "List registered experiments");

  // solve
  auto* solve = app.add_subcommand("solve", "Tabulate phi(z,t) for a tree family");
  SolveFlags solve_flags;
  auto& sv = solve_flags.values;
  std::string pmf_text, tree_file;
  auto flag = [&](CLI::Option* option, std::function<void(cg::app::SolveConfig&)> apply) {
    solve_flags.setters.emplace_back(option, std::move(apply));
  };
  flag(solve->add_option("--family", sv.family, "tree-file, dary, regular, gw-poisson or gw-pmf"),
       [&](auto& c) { c.family = sv.family; });
  flag(solve->add_option("-d", sv.d, "Branching number for dary"), [&](auto& c) { c.d = sv.d; });
  flag(solve->add_option("-r", sv.r, "Degree for regular"), [&](auto& c) { c.r = sv.r; });
  flag(solve->add_option("--mean,-c", sv.mean, "Poisson offspring mean"),
       [&](auto& c) { c.mean = sv.mean; });
  flag(solve->add_option("--pmf", pmf_text, "Offspring pmf p0,p1,..."),
       [&](auto& c) { c.pmf = sv.pmf; });
  flag(solve->add_option("--tree", tree_file, "Edge-list file for tree-file"),
       [&](auto& c) { c.tree_file = sv.tree_file; });
  flag(solve->add_option("--root", sv.root, "Root vertex for tree-file"),
       [&](auto& c) { c.root = sv.root; });
  flag(solve->add_option("--z-points", sv.grid.z_points, "Number of z nodes"),
       [&](auto& c) { c.grid.z_points = sv.grid.z_points; });
  flag(solve->add_option("--t-step", sv.grid.t_step, "Time step"),
       [&](auto& c) { c.grid.t_step = sv.grid.t_step; });
  flag(solve->add_option("--t-max", sv.grid.t_max, "Final time (at most 1)"),
       [&](auto& c) { c.grid.t_max = sv.grid.t_max; });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Print a closed-form value as JSON");
  std::string oracle_name;
  std::vector<std::string> oracle_params;
  oracle->add_option("name", oracle_name, "Quantity name")->required();
  oracle->add_option("-p,--param", oracle_params, "Parameter key=value");
  oracle->add_flag_callback("--list", [] {
    for (const auto& name : cg::app::oracle_names()) std::cout << name << "\n";
    std::exit(0);
  }, "List quantity names");

  // validate
  auto* validate = app.add_subcommand("validate", "Run the acceptance criteria");
  std::string suite = "fast", report_path;
  double budget = 0.0;
  int tamper = 0;
  std::vector<int> only;
  validate->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  validate->add_option("--budget", budget, "Wall-clock budget in seconds (0: none)");
  auto* tamper_opt =
      validate->add_option("--tamper", tamper, "Perturb the oracle constant of one criterion");
  validate->add_option("--only", only, "Run only these criterion ids")->delimiter(',');
  validate->add_option("--report", report_path, "Write the JSON report here");

  // model gen
  auto* model = app.add_subcommand("model", "Meeting model utilities");
  model->require_subcommand(1);
  auto* gen = model->add_subcommand("gen", "Write a generated model as an edge list");
  std::string gen_family, gen_file;
  std::vector<std::string> gen_params;
  gen->add_option("family", gen_family, "Model family")->required();
  gen->add_option("-p,--param", gen_params, "Parameter key=value");
  gen->add_option("--file", gen_file, "Output file (default: <out>/<family>.edges or stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }

  if (*seed_opt) g.seed = seed;
  if (*threads_opt) g.threads = threads;
  if (*out_opt) g.out = out;
  if (*config_opt) g.config = config;

  if (*simulate) return guarded([&] { return cmd_simulate(g, experiment, sim_overrides); });
  if (*solve) {
    return guarded([&] {
      if (!pmf_text.empty()) sv.pmf = cg::app::parse_real_list(pmf_text);
      if (!tree_file.empty()) sv.tree_file = tree_file;
      return cmd_solve(g, solve_flags);
    });
  }
  if (*oracle) return guarded([&] { return cmd_oracle(oracle_name, oracle_params); });
  if (*validate) {
    return guarded([&] {
      return cmd_validate(g, suite, budget,
                          *tamper_opt ? std::optional<int>(tamper) : std::nullopt, only,
                          report_path);
    });
  }
  if (*gen) return guarded([&] { return cmd_model_gen(g, gen_family, gen_params, gen_file); });
  return kExitFailure;
}
