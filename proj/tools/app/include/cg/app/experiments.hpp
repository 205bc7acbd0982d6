#pragma once

#include <atomic>
#include <cstddef>
#include <vector>

#include "cg/app/config.hpp"
#include "cg/app/output.hpp"
#include "json.hpp"

namespace cg::app {

std::string version_string();

struct ExperimentResult {
  nlohmann::ordered_json results;
  std::vector<Table> tables;
  bool truncated = false;
  /// Replicates that completed and passed the invariant checks.
  std::size_t replicates_completed = 0;
};

/// Runs a registered experiment. Every replicate is checked with the engine
/// verifiers; a failure propagates as cg::InvariantViolation. When `cancel`
/// is raised the completed replicates are summarized and `truncated` is set.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::atomic<bool>* cancel = nullptr);

/// {version, config, truncated, results}.
nlohmann::ordered_json summary_json(const ExperimentConfig& config,
                                    const ExperimentResult& result);

/// Writes <output_dir>/<experiment>.json and one <experiment>_<table>.csv per
/// table.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace cg::app
