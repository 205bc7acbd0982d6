#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cg::app {

enum class Suite { Fast, Full };

Suite parse_suite(std::string_view name);
std::string suite_name(Suite suite);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// False for report-only criteria, which always pass.
  bool gated = true;
  nlohmann::ordered_json measured;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  Suite suite = Suite::Fast;
  std::uint64_t seed = 20240601;
  std::size_t threads = 1;
  /// Criterion whose oracle constant is perturbed, for fault injection.
  std::optional<int> tamper;
  /// Restrict the run to these criterion ids; empty runs all.
  std::vector<int> only;
  const std::atomic<bool>* cancel = nullptr;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

struct ValidationReport {
  Suite suite = Suite::Fast;
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;

  bool passed() const;
  /// Deterministic report: timings are left out.
  nlohmann::ordered_json to_json() const;
};

/// Criterion ids that accept a tampered oracle constant.
const std::vector<int>& tamperable_criteria();

ValidationReport run_validation(const ValidationOptions& options);

/// One human-readable line, e.g. "PASS  1 kingman-fixation  mean=...".
std::string format_line(const CriterionResult& result);

}  // namespace cg::app
