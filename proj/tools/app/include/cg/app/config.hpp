#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cg/engine.hpp"
#include "cg/models.hpp"
#include "cg/rng.hpp"
#include "cg/stats.hpp"
#include "json.hpp"

namespace cg::app {

/// Malformed or out-of-schema configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model family with its resolved parameters. Every key of the family's
/// schema is present after resolution.
struct ModelSpec {
  std::string family;
  std::map<std::string, std::string> params;

  double real(const std::string& key) const;
  std::size_t integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
};

struct ExperimentConfig {
  std::string experiment;
  ModelSpec model;
  ClockKind clock = ClockKind::Exponential;
  std::size_t replicates = 1000;
  std::vector<double> times;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::size_t threads = 1;
  /// Initial weights for the standardized process; empty means simple.
  std::vector<Money> weights;
  /// Sorted fortune multiset to condition on (exchangeability only).
  std::vector<Money> pattern;
};

const std::vector<std::string>& registered_experiments();
const std::vector<std::string>& model_families();

/// Parameters of `family` filled with their defaults.
ModelSpec default_model(std::string_view family);
ExperimentConfig default_config(std::string_view experiment);

/// Reads an INI-style file: an [experiment] section (with `name`) and an
/// optional [model] section. Keys not given take the experiment's defaults.
/// Unknown sections or keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets one `key=value` override, `section.key` or a bare experiment key.
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// Checks schema-level constraints; throws ConfigError.
void validate(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
nlohmann::ordered_json to_json(const ModelSpec& model);

/// Model parameters are sampled per replicate for random families.
bool is_random_family(std::string_view family);
MeetingModel build_model(const ModelSpec& model, Rng& rng);
stats::ModelSource model_source(const ModelSpec& model);

std::string clock_name(ClockKind clock);
ClockKind parse_clock(std::string_view text);

std::vector<double> parse_real_list(std::string_view text);

}  // namespace cg::app
