#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cg/app/commands.hpp"
#include "cg/app/config.hpp"
#include "cg/app/experiments.hpp"
#include "cg/app/output.hpp"
#include "cg/app/validation.hpp"
#include "gtest/gtest.h"

namespace {

using namespace cg::app;
namespace fs = std::filesystem;

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cg_test_app_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Config, RegisteredExperiments) {
  const std::set<std::string> names(registered_experiments().begin(),
                                    registered_experiments().end());
  const std::set<std::string> expected{
      "kingman",         "winner-uniformity", "pair-moment",        "construction-equivalence",
      "er-density",      "rtree-density",     "near-clique-bounds", "pgw-geometric",
      "torus-exponent",  "exchangeability"};
  EXPECT_EQ(names, expected);
  for (const auto& name : registered_experiments()) EXPECT_NO_THROW(validate(default_config(name)));
  EXPECT_THROW(default_config("nope"), ConfigError);
}

TEST(Config, ParseOverridesDefaults) {
  const auto c = parse(R"(
# comment
; another comment
[experiment]
name = kingman
replicates = 50
times = 0.5, 1.5
seed = 99
threads = 2
output_dir = results

[model]
n = 12
)");
  EXPECT_EQ(c.experiment, "kingman");
  EXPECT_EQ(c.replicates, 50u);
  EXPECT_EQ(c.times, (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.output_dir, fs::path("results"));
  EXPECT_EQ(c.model.family, "complete");
  EXPECT_EQ(c.model.integer("n"), 12u);
  EXPECT_EQ(c.model.real("rate"), 1.0);
}

TEST(Config, FamilySwitchStartsFromFamilyDefaults) {
  const auto c = parse("[experiment]\nname = kingman\n[model]\nfamily = torus\nside = 8\n");
  EXPECT_EQ(c.model.family, "torus");
  EXPECT_EQ(c.model.integer("side"), 8u);
  EXPECT_EQ(c.model.integer("dim"), 1u);
  EXPECT_FALSE(c.model.params.contains("n"));
}

TEST(Config, StrictRejection) {
  EXPECT_THROW(parse("[experiment]\nname = kingman\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\n[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\n[model]\nwidth = 3\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nreplicates = 3\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\nreplicates = many\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\nreplicates = -4\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\nreplicates = 0\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\ntimes = 2, 1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\nclock = weekly\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\nname = pair-moment\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = er-density\n[model]\nfamily = complete\n"),
               ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = pgw-geometric\nclock = uniform\ntimes = 1.5\n"),
               ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = winner-uniformity\nweights = 1, 2\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = exchangeability\npattern = 2, 2, 1, 0\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = kingman\npattern = 4, 0, 0, 0\n"), ConfigError);
  EXPECT_THROW(parse("not ini at all"), ConfigError);
}

TEST(Config, Overrides) {
  auto c = default_config("pair-moment");
  apply_override(c, "replicates=10");
  apply_override(c, "model.n=7");
  apply_override(c, "experiment.times=0.1,0.2");
  EXPECT_EQ(c.replicates, 10u);
  EXPECT_EQ(c.model.integer("n"), 7u);
  EXPECT_EQ(c.times.size(), 2u);
  apply_override(c, "model.family=ring-near-cliques");
  EXPECT_EQ(c.model.integer("r"), 6u);
  EXPECT_THROW(apply_override(c, "replicates"), ConfigError);
  EXPECT_THROW(apply_override(c, "model.n=3"), ConfigError);
}

TEST(Config, JsonEmbedsEveryResolvedField) {
  const auto j = to_json(default_config("er-density"));
  for (const char* key : {"experiment", "model", "clock", "replicates", "times", "seed", "threads",
                          "output_dir", "weights", "pattern"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["model"]["family"], "erdos-renyi");
  EXPECT_EQ(j["model"]["n"], 20000);
  EXPECT_EQ(j["model"]["c"], 1.0);
}

TEST(Output, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  std::ostringstream out;
  write_csv(out, Table{"t", {"x", "y,z"}, {{"1", "2"}}});
  EXPECT_EQ(out.str(), "x,\"y,z\"\r\n1,2\r\n");
}

TEST(Output, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-300, 123456789.125}) {
    const auto text = format_number(v);
    EXPECT_EQ(std::stod(text), v) << text;
  }
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Experiments, KingmanSmall) {
  auto c = default_config("kingman");
  c.model.params["n"] = "5";
  c.replicates = 4000;
  c.times = {0.0, 100.0};
  const auto r = run_experiment(c);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.replicates_completed, 4000u);
  const auto& ft = r.results["fixation_time"];
  EXPECT_NEAR(ft["oracle"].get<double>(), 1.6, 1e-12);
  EXPECT_LT(std::abs(ft["z_score"].get<double>()), 4.0);
  ASSERT_EQ(r.tables.size(), 1u);
  EXPECT_EQ(r.tables[0].rows[0][1], "1");
  EXPECT_NEAR(std::stod(r.tables[0].rows[1][1]), 0.2, 1e-12);
}

TEST(Experiments, ThreadCountDoesNotChangeResults) {
  auto c = default_config("winner-uniformity");
  c.replicates = 3000;
  const auto one = run_experiment(c);
  c.threads = 3;
  const auto three = run_experiment(c);
  EXPECT_EQ(one.results.dump(), three.results.dump());
}

TEST(Experiments, WeightedWinner) {
  auto c = default_config("winner-uniformity");
  c.model.params["n"] = "3";
  c.weights = {2, 0, 2};
  c.replicates = 4000;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.results["winner_frequencies"][1]["mean"].get<double>(), 0.0);
  EXPECT_GT(r.results["chi_square"]["p_value"].get<double>(), 1e-4);
}

TEST(Experiments, SmallRunsOfEveryExperiment) {
  for (const auto& name : registered_experiments()) {
    auto c = default_config(name);
    c.replicates = name == "er-density" || name == "rtree-density" ? 2 : 200;
    if (name == "er-density") c.model.params["n"] = "500";
    if (name == "rtree-density") c.model.params["n"] = "200";
    if (name == "torus-exponent") c.model.params["side"] = "64";
    const auto r = run_experiment(c);
    EXPECT_EQ(r.replicates_completed, c.replicates) << name;
    const auto s = summary_json(c, r);
    EXPECT_EQ(s["version"], version_string());
    EXPECT_EQ(s["config"]["experiment"], name);
    EXPECT_FALSE(s["truncated"].get<bool>());
    EXPECT_FALSE(s["results"].empty()) << name;
  }
}

TEST(Experiments, CancelledRunIsTruncated) {
  std::atomic<bool> cancel{true};
  auto c = default_config("pair-moment");
  c.replicates = 100;
  const auto r = run_experiment(c, &cancel);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.replicates_completed, 0u);
  c.output_dir = scratch_dir("cancel");
  write_outputs(c, r);
  const auto summary = nlohmann::json::parse(slurp(c.output_dir / "pair-moment.json"));
  EXPECT_TRUE(summary["truncated"].get<bool>());
}

TEST(Experiments, OutputsAreByteStable) {
  auto c = default_config("construction-equivalence");
  c.replicates = 500;
  c.output_dir = scratch_dir("stable");
  write_outputs(c, run_experiment(c));
  const auto json = slurp(c.output_dir / "construction-equivalence.json");
  const auto csv = slurp(c.output_dir / "construction-equivalence_joint_law.csv");
  write_outputs(c, run_experiment(c));
  EXPECT_EQ(json, slurp(c.output_dir / "construction-equivalence.json"));
  EXPECT_EQ(csv, slurp(c.output_dir / "construction-equivalence_joint_law.csv"));
  EXPECT_EQ(csv.rfind("category,direct,augmented,token\r\n", 0), 0u);
}

TEST(Experiments, EdgeListModel) {
  const auto dir = scratch_dir("edges");
  {
    std::ofstream out(dir / "path.edges");
    out << "n 3\n0 1 1\n1 2 1\n";
  }
  auto c = default_config("winner-uniformity");
  c.model = default_model("edge-list");
  c.model.params["path"] = (dir / "path.edges").string();
  c.replicates = 500;
  const auto r = run_experiment(c);
  EXPECT_GT(r.results["unresolved_runs"].get<std::size_t>(), 0u);
  c.model.params["path"] = (dir / "missing.edges").string();
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Commands, Oracle) {
  const auto v = evaluate_oracle("pgw-solvent", {{"c", "1"}, {"t", "1"}});
  EXPECT_EQ(v["name"], "pgw-solvent");
  EXPECT_EQ(v["params"]["c"], 1.0);
  EXPECT_DOUBLE_EQ(v["value"].get<double>(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(evaluate_oracle("kappa", {{"r", "6"}})["value"].get<double>(), 15.0 / 7.0);
  EXPECT_EQ(evaluate_oracle("kingman-tail", {{"r", "2"}, {"delta", "0.5"}, {"t", "1"}})["value"]["raw"],
            2.0);
  EXPECT_THROW(evaluate_oracle("nope", {}), ConfigError);
  EXPECT_THROW(evaluate_oracle("kappa", {}), ConfigError);
  EXPECT_THROW(evaluate_oracle("kappa", {{"r", "6"}, {"x", "1"}}), ConfigError);
  EXPECT_THROW(evaluate_oracle("kappa", {{"r", "2.5"}}), ConfigError);
  EXPECT_THROW(evaluate_oracle("epsilon", {{"d", "0"}}), ConfigError);
  for (const auto& name : oracle_names()) EXPECT_FALSE(name.empty());
}

TEST(Commands, SolveTables) {
  SolveConfig dary;
  dary.d = 5;
  const auto out = run_solve(dary);
  ASSERT_EQ(out.table.header.size(), dary.grid.z_points + 1);
  for (const auto& row : out.table.rows) EXPECT_EQ(row.back(), "0");
  EXPECT_TRUE(out.summary["invariants_ok"].get<bool>());
  EXPECT_LE(out.summary["bounds_max_violation"].get<double>(), 1e-4);

  SolveConfig gw;
  gw.family = "gw-poisson";
  const auto g = run_solve(gw);
  EXPECT_NEAR(g.summary["solvent_probability"].get<double>(), 2.0 / 3.0, 1e-4);
  EXPECT_GT(g.summary["richardson"]["error"].get<double>(), 0.0);

  SolveConfig regular;
  regular.family = "regular";
  regular.r = 10;
  const auto r = run_solve(regular);
  EXPECT_TRUE(r.summary["sandwich"]["holds"].get<bool>());

  SolveConfig pmf;
  pmf.family = "gw-pmf";
  pmf.pmf = {0.0, 0.0, 1.0};
  EXPECT_NEAR(run_solve(pmf).summary["solvent_probability"].get<double>(),
              run_solve(SolveConfig{}).summary["solvent_probability"].get<double>(), 1e-12);
}

TEST(Commands, SolveConfigParsing) {
  std::istringstream ok("[solve]\nfamily = regular\nr = 4\nz_points = 21\nt_step = 0.05\n");
  const auto c = parse_solve_config(ok);
  EXPECT_EQ(c.family, "regular");
  EXPECT_EQ(c.r, 4u);
  EXPECT_EQ(c.grid.z_points, 21u);
  std::istringstream unknown("[solve]\nfamily = dary\nwidth = 2\n");
  EXPECT_THROW(parse_solve_config(unknown), ConfigError);
  std::istringstream family("[solve]\nfamily = lattice\n");
  EXPECT_THROW(parse_solve_config(family), ConfigError);
  std::istringstream grid("[solve]\nt_step = 0.3\n");
  EXPECT_THROW(parse_solve_config(grid), ConfigError);
}

TEST(Commands, Assignments) {
  const auto kv = parse_assignments({"a=1", "b=x=y"});
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "x=y");
  EXPECT_THROW(parse_assignments({"novalue"}), ConfigError);
}

TEST(Validation, SolverCriteriaPassAndTamperFails) {
  ValidationOptions options;
  options.only = {8, 9};
  const auto report = run_validation(options);
  ASSERT_EQ(report.criteria.size(), 2u);
  EXPECT_TRUE(report.passed());
  for (const auto& c : report.criteria) EXPECT_EQ(format_line(c).rfind("PASS", 0), 0u);

  options.tamper = 8;
  const auto tampered = run_validation(options);
  EXPECT_FALSE(tampered.passed());
  EXPECT_FALSE(tampered.criteria[0].passed);
  EXPECT_EQ(tampered.criteria[0].id, 8);
  EXPECT_TRUE(tampered.criteria[1].passed);

  options.tamper = 4;
  EXPECT_THROW(run_validation(options), ConfigError);
}

TEST(Validation, ReportIsDeterministic) {
  ValidationOptions options;
  options.only = {2, 6, 12};
  const auto a = run_validation(options);
  options.threads = 3;
  const auto b = run_validation(options);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_TRUE(a.passed());
  ASSERT_EQ(a.criteria.back().id, 12);
  EXPECT_GT(a.criteria.back().measured["replicates_checked"].get<std::size_t>(), 0u);
}

}  // namespace
