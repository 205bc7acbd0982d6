#include "cg/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace cg::app {
namespace {

enum class Kind { Integer, Real, Text };

struct ParamSpec {
  std::string_view key;
  Kind kind;
  std::string_view fallback;
};

struct FamilySpec {
  std::string_view name;
  bool random;
  std::vector<ParamSpec> params;
};

const std::vector<FamilySpec>& families() {
  static const std::vector<FamilySpec> table{
      {"complete", false, {{"n", Kind::Integer, "6"}, {"rate", Kind::Real, "1"}}},
      {"edge-list", false, {{"path", Kind::Text, ""}}},
      {"ring-near-cliques", false, {{"r", Kind::Integer, "6"}, {"k", Kind::Integer, "50"}}},
      {"erdos-renyi", true, {{"n", Kind::Integer, "20000"}, {"c", Kind::Real, "1"}}},
      {"torus",
       false,
       {{"side", Kind::Integer, "512"}, {"dim", Kind::Integer, "1"}, {"alpha", Kind::Real, "2"}}},
      {"dary-tree", false, {{"d", Kind::Integer, "2"}, {"depth", Kind::Integer, "10"}}},
      {"regular-tree", false, {{"r", Kind::Integer, "3"}, {"depth", Kind::Integer, "8"}}},
      {"gw-poisson", true, {{"mean", Kind::Real, "1"}, {"depth", Kind::Integer, "12"}}},
      {"random-regular", true, {{"n", Kind::Integer, "10000"}, {"r", Kind::Integer, "10"}}},
  };
  return table;
}

const FamilySpec& family_spec(std::string_view name) {
  for (const auto& f : families())
    if (f.name == name) return f;
  throw ConfigError("unknown model family '" + std::string(name) + "'");
}

const ParamSpec& param_spec(const FamilySpec& family, std::string_view key) {
  for (const auto& p : family.params)
    if (p.key == key) return p;
  throw ConfigError("model family '" + std::string(family.name) + "' has no parameter '" +
                    std::string(key) + "'");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_real(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t to_unsigned(std::string_view text, std::string_view what) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(std::string(what) + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  return value;
}

std::vector<Money> parse_money_list(std::string_view text, std::string_view what) {
  std::vector<Money> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    out.push_back(to_unsigned(piece, what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void set_param(ModelSpec& model, std::string_view key, std::string_view value) {
  const auto& spec = param_spec(family_spec(model.family), key);
  const std::string what = "model." + std::string(key);
  value = trim(value);
  switch (spec.kind) {
    case Kind::Integer:
      to_unsigned(value, what);
      break;
    case Kind::Real:
      to_real(value, what);
      break;
    case Kind::Text:
      break;
  }
  model.params[std::string(key)] = std::string(value);
}

void set_experiment_key(ExperimentConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "name") {
    if (value != c.experiment) throw ConfigError("experiment name cannot be overridden");
  } else if (key == "replicates") {
    c.replicates = to_unsigned(value, "replicates");
  } else if (key == "clock") {
    c.clock = parse_clock(value);
  } else if (key == "times") {
    c.times = parse_real_list(value);
  } else if (key == "seed") {
    c.seed = to_unsigned(value, "seed");
  } else if (key == "threads") {
    c.threads = to_unsigned(value, "threads");
  } else if (key == "output_dir") {
    c.output_dir = std::string(value);
  } else if (key == "weights") {
    c.weights = parse_money_list(value, "weights");
  } else if (key == "pattern") {
    c.pattern = parse_money_list(value, "pattern");
  } else {
    throw ConfigError("unknown key 'experiment." + std::string(key) + "'");
  }
}

void set_family(ModelSpec& model, std::string_view family) {
  family = trim(family);
  if (family != model.family) model = default_model(family);
}

std::vector<std::string_view> allowed_families(std::string_view experiment) {
  if (experiment == "er-density") return {"erdos-renyi"};
  if (experiment == "rtree-density") return {"random-regular"};
  if (experiment == "near-clique-bounds") return {"ring-near-cliques"};
  if (experiment == "pgw-geometric") return {"gw-poisson"};
  if (experiment == "torus-exponent") return {"torus"};
  if (experiment == "exchangeability") return {"complete"};
  std::vector<std::string_view> fixed;
  for (const auto& f : families())
    if (!f.random) fixed.push_back(f.name);
  return fixed;
}

std::size_t model_size_hint(const ModelSpec& m) {
  if (m.params.contains("n")) return m.integer("n");
  return 0;
}

}  // namespace

double ModelSpec::real(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing model parameter '" + key + "'");
  return to_real(it->second, "model." + key);
}

std::size_t ModelSpec::integer(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing model parameter '" + key + "'");
  return static_cast<std::size_t>(to_unsigned(it->second, "model." + key));
}

const std::string& ModelSpec::text(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing model parameter '" + key + "'");
  return it->second;
}

const std::vector<std::string>& registered_experiments() {
  static const std::vector<std::string> names{
      "kingman",         "winner-uniformity",  "pair-moment",   "construction-equivalence",
      "er-density",      "rtree-density",      "near-clique-bounds", "pgw-geometric",
      "torus-exponent",  "exchangeability"};
  return names;
}

const std::vector<std::string>& model_families() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : families()) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

ModelSpec default_model(std::string_view family) {
  const auto& spec = family_spec(family);
  ModelSpec m{std::string(spec.name), {}};
  for (const auto& p : spec.params) m.params[std::string(p.key)] = std::string(p.fallback);
  return m;
}

ExperimentConfig default_config(std::string_view experiment) {
  ExperimentConfig c;
  c.experiment = std::string(experiment);
  auto model = [&](std::string_view family,
                   std::initializer_list<std::pair<std::string_view, std::string_view>> kv) {
    c.model = default_model(family);
    for (const auto& [k, v] : kv) set_param(c.model, k, v);
  };
  if (experiment == "kingman") {
    model("complete", {{"n", "200"}});
    c.replicates = 2000;
    c.times = {0.1, 0.5, 1.0, 2.0};
  } else if (experiment == "winner-uniformity") {
    model("complete", {{"n", "6"}});
    c.replicates = 60000;
  } else if (experiment == "pair-moment") {
    model("complete", {{"n", "50"}});
    c.replicates = 20000;
    c.times = {0.25, 0.5, 1.0};
  } else if (experiment == "construction-equivalence") {
    model("complete", {{"n", "4"}});
    c.replicates = 100000;
    c.times = {0.5};
  } else if (experiment == "er-density") {
    model("erdos-renyi", {});
    c.replicates = 20;
  } else if (experiment == "rtree-density") {
    model("random-regular", {});
    c.replicates = 20;
  } else if (experiment == "near-clique-bounds") {
    model("ring-near-cliques", {});
    c.replicates = 2000;
  } else if (experiment == "pgw-geometric") {
    model("gw-poisson", {});
    c.clock = ClockKind::UniformTimeChange;
    c.replicates = 50000;
    c.times = {1.0};
  } else if (experiment == "torus-exponent") {
    model("torus", {});
    c.replicates = 100;
    c.times = {0.5, 1, 2, 4, 8, 16, 32, 64, 128, 256};
  } else if (experiment == "exchangeability") {
    model("complete", {{"n", "4"}});
    c.replicates = 100000;
    c.times = {0.4};
    c.pattern = {2, 2, 0, 0};
  } else {
    throw ConfigError("unknown experiment '" + std::string(experiment) + "'");
  }
  return c;
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [name, section] : tree) {
    if (name != "experiment" && name != "model")
      throw ConfigError("unknown section or top-level key '" + name + "'");
    if (section.empty() && !section.data().empty())
      throw ConfigError("key '" + name + "' must be inside a section");
  }
  const auto experiment = tree.get_child_optional("experiment");
  if (!experiment || !experiment->get_optional<std::string>("name"))
    throw ConfigError("missing [experiment] name");
  ExperimentConfig config = default_config(trim(experiment->get<std::string>("name")));
  if (const auto model = tree.get_child_optional("model")) {
    if (const auto family = model->get_optional<std::string>("family"))
      set_family(config.model, *family);
    for (const auto& [key, value] : *model)
      if (key != "family") set_param(config.model, key, value.data());
  }
  for (const auto& [key, value] : *experiment) set_experiment_key(config, key, value.data());
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
  std::string_view key = trim(assignment.substr(0, eq));
  const std::string_view value = assignment.substr(eq + 1);
  if (key.starts_with("model.")) {
    key.remove_prefix(6);
    if (key == "family") set_family(config.model, value);
    else set_param(config.model, key, value);
  } else {
    if (key.starts_with("experiment.")) key.remove_prefix(11);
    set_experiment_key(config, key, value);
  }
}

void validate(const ExperimentConfig& c) {
  const auto& names = registered_experiments();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  const auto& family = family_spec(c.model.family);
  for (const auto& p : family.params)
    if (!c.model.params.contains(std::string(p.key)))
      throw ConfigError("missing model parameter '" + std::string(p.key) + "'");
  const auto allowed = allowed_families(c.experiment);
  if (std::find(allowed.begin(), allowed.end(), c.model.family) == allowed.end())
    throw ConfigError("experiment '" + c.experiment + "' does not accept model family '" +
                      c.model.family + "'");
  if (c.model.family == "edge-list" && c.model.text("path").empty())
    throw ConfigError("edge-list model needs a path");
  if (c.replicates == 0) throw ConfigError("replicates must be positive");
  if (c.threads == 0) throw ConfigError("threads must be positive");
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    if (c.times[k] < 0.0) throw ConfigError("times must be non-negative");
    if (k > 0 && c.times[k] < c.times[k - 1]) throw ConfigError("times must be non-decreasing");
  }
  const bool needs_time = c.experiment == "pair-moment" || c.experiment == "construction-equivalence" ||
                          c.experiment == "pgw-geometric" || c.experiment == "exchangeability" ||
                          c.experiment == "torus-exponent";
  if (needs_time && c.times.empty())
    throw ConfigError("experiment '" + c.experiment + "' needs at least one time");
  if (c.clock == ClockKind::UniformTimeChange) {
    for (double t : c.times)
      if (t > 1.0) throw ConfigError("uniform clock times must lie in [0, 1]");
  }
  const std::size_t n = model_size_hint(c.model);
  if (!c.weights.empty()) {
    if (c.experiment != "winner-uniformity")
      throw ConfigError("weights are only used by winner-uniformity");
    if (n != 0 && c.weights.size() != n) throw ConfigError("weights must list one value per agent");
    if (std::accumulate(c.weights.begin(), c.weights.end(), Money{0}) == 0)
      throw ConfigError("weights must not all be zero");
  }
  if (c.experiment == "exchangeability") {
    if (n > 8) throw ConfigError("exchangeability supports at most 8 agents");
    if (c.pattern.size() != n) throw ConfigError("pattern must list one fortune per agent");
    if (std::accumulate(c.pattern.begin(), c.pattern.end(), Money{0}) != n)
      throw ConfigError("pattern fortunes must sum to the number of agents");
  } else if (!c.pattern.empty()) {
    throw ConfigError("pattern is only used by exchangeability");
  }
  if (c.experiment == "construction-equivalence" && n > 12)
    throw ConfigError("construction-equivalence supports at most 12 agents");
}

nlohmann::ordered_json to_json(const ModelSpec& model) {
  nlohmann::ordered_json out;
  out["family"] = model.family;
  for (const auto& p : family_spec(model.family).params) {
    const std::string key(p.key);
    switch (p.kind) {
      case Kind::Integer:
        out[key] = model.integer(key);
        break;
      case Kind::Real:
        out[key] = model.real(key);
        break;
      case Kind::Text:
        out[key] = model.text(key);
        break;
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json out;
  out["experiment"] = c.experiment;
  out["model"] = to_json(c.model);
  out["clock"] = clock_name(c.clock);
  out["replicates"] = c.replicates;
  out["times"] = c.times;
  out["seed"] = c.seed;
  out["threads"] = c.threads;
  out["output_dir"] = c.output_dir.generic_string();
  out["weights"] = c.weights;
  out["pattern"] = c.pattern;
  return out;
}

bool is_random_family(std::string_view family) { return family_spec(family).random; }

MeetingModel build_model(const ModelSpec& m, Rng& rng) {
  const std::string& f = m.family;
  if (f == "complete") return complete_graph(m.integer("n"), m.real("rate"));
  if (f == "edge-list") {
    std::ifstream in(m.text("path"));
    if (!in) throw ConfigError("cannot open edge list " + m.text("path"));
    return read_edge_list(in);
  }
  if (f == "ring-near-cliques") return ring_of_near_cliques(m.integer("r"), m.integer("k"));
  if (f == "erdos-renyi") return erdos_renyi(m.integer("n"), m.real("c"), rng);
  if (f == "torus") return torus_power_law(m.integer("side"), m.integer("dim"), m.real("alpha"));
  if (f == "dary-tree") return dary_tree(m.integer("d"), m.integer("depth"));
  if (f == "regular-tree") return regular_tree(m.integer("r"), m.integer("depth"));
  if (f == "gw-poisson")
    return galton_watson_tree(GwOffspring::poisson(m.real("mean")), m.integer("depth"), rng);
  if (f == "random-regular") return random_regular_graph(m.integer("n"), m.integer("r"), rng);
  throw ConfigError("unknown model family '" + f + "'");
}

stats::ModelSource model_source(const ModelSpec& model) {
  if (!is_random_family(model.family)) {
    Rng unused(0);
    return stats::fixed_model(build_model(model, unused));
  }
  if (model.family == "gw-poisson") {
    auto offspring = std::make_shared<GwOffspring>(GwOffspring::poisson(model.real("mean")));
    const std::size_t depth = model.integer("depth");
    return [offspring, depth](Rng& rng) { return galton_watson_tree(*offspring, depth, rng); };
  }
  return [model](Rng& rng) { return build_model(model, rng); };
}

std::string clock_name(ClockKind clock) {
  return clock == ClockKind::Exponential ? "exponential" : "uniform";
}

ClockKind parse_clock(std::string_view text) {
  text = trim(text);
  if (text == "exponential") return ClockKind::Exponential;
  if (text == "uniform") return ClockKind::UniformTimeChange;
  throw ConfigError("clock must be 'exponential' or 'uniform', got '" + std::string(text) + "'");
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(to_real(text.substr(start, comma == std::string_view::npos ? text.npos
                                                                             : comma - start),
                          "times"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace cg::app
