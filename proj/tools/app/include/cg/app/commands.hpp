#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cg/app/output.hpp"
#include "cg/models.hpp"
#include "cg/solver.hpp"
#include "json.hpp"

namespace cg::app {

struct SolveConfig {
  /// One of tree-file, dary, regular, gw-poisson, gw-pmf.
  std::string family = "dary";
  std::size_t d = 2;
  std::size_t r = 3;
  double mean = 1.0;
  std::vector<double> pmf;
  std::filesystem::path tree_file;
  AgentId root = 0;
  solver::Grid grid;
  std::filesystem::path output_dir = "out";
};

/// Reads a [solve] section (keys: family, d, r, mean, pmf, tree_file, root,
/// z_points, t_step, t_max, output_dir); unknown keys are rejected.
SolveConfig parse_solve_config(std::istream& in);
void validate(const SolveConfig& config);
nlohmann::ordered_json to_json(const SolveConfig& config);

struct SolveOutput {
  /// Rows are t-grid nodes, columns z-grid nodes.
  Table table;
  nlohmann::ordered_json summary;
};

SolveOutput run_solve(const SolveConfig& config);
/// Writes <output_dir>/solve_<family>.csv and .json.
void write_outputs(const SolveConfig& config, const SolveOutput& output);

/// Evaluates a named closed-form quantity; returns {name, params, value}.
/// Throws ConfigError for unknown names or parameters.
nlohmann::ordered_json evaluate_oracle(const std::string& name,
                                       const std::map<std::string, std::string>& params);
const std::vector<std::string>& oracle_names();

/// Splits "key=value" strings; throws ConfigError on malformed input.
std::map<std::string, std::string> parse_assignments(const std::vector<std::string>& items);

}  // namespace cg::app
