#include "cg/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cg/app/config.hpp"
#include "cg/app/experiments.hpp"
#include "cg/oracle.hpp"

namespace cg::app {
namespace {

using nlohmann::ordered_json;

double number(const std::map<std::string, std::string>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
  const auto values = parse_real_list(it->second);
  if (values.size() != 1) throw ConfigError("parameter '" + key + "' must be one number");
  return values.front();
}

std::size_t count(const std::map<std::string, std::string>& params, const std::string& key) {
  const double v = number(params, key);
  if (v < 0.0 || v != std::floor(v) || v > 1e15)
    throw ConfigError("parameter '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

MeetingModel load_tree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tree file " + path.string());
  return read_edge_list(in);
}

solver::PgfTable solve_on(const SolveConfig& c, const solver::Grid& grid) {
  if (c.family == "dary") return solver::solve_dary_fixed_point(c.d, grid);
  if (c.family == "regular") return solver::solve_r_regular(c.r, grid);
  if (c.family == "gw-poisson") return solver::solve_gw(GwOffspring::poisson(c.mean), grid);
  if (c.family == "gw-pmf") return solver::solve_gw(GwOffspring(c.pmf), grid);
  if (c.family == "tree-file") return solver::solve_tree_recursion(load_tree(c.tree_file), c.root, grid);
  throw ConfigError("unknown solve family '" + c.family + "'");
}

struct OracleEntry {
  std::string name;
  std::vector<std::string> params;
  std::function<ordered_json(const std::map<std::string, std::string>&)> eval;
};

const std::vector<OracleEntry>& oracle_table() {
  using P = std::map<std::string, std::string>;
  static const std::vector<OracleEntry> table{
      {"kingman-fixation", {"n"},
       [](const P& p) { return ordered_json(oracle::kingman_expected_fixation(count(p, "n"))); }},
      {"kingman-fixation-sum", {"n"},
       [](const P& p) { return ordered_json(oracle::kingman_expected_fixation_sum(count(p, "n"))); }},
      {"pair-moment", {"rate", "t"},
       [](const P& p) {
         return ordered_json(oracle::pair_moment_exact(number(p, "rate"), number(p, "t")));
       }},
      {"kingman-tail", {"r", "delta", "t"},
       [](const P& p) {
         const auto b = oracle::kingman_tail_bound(count(p, "r"), number(p, "delta"), number(p, "t"));
         return ordered_json{{"value", b.value}, {"raw", b.raw}};
       }},
      {"sigma", {"m"}, [](const P& p) { return ordered_json(oracle::sigma_m(count(p, "m"))); }},
      {"kappa", {"r"}, [](const P& p) { return ordered_json(oracle::kappa_r(count(p, "r"))); }},
      {"near-clique-bounds", {"r"},
       [](const P& p) {
         const auto b = oracle::near_clique_density_bounds(count(p, "r"));
         return ordered_json{{"lower", b.lower}, {"upper", b.upper}};
       }},
      {"epsilon", {"d"}, [](const P& p) { return ordered_json(oracle::epsilon_d(count(p, "d"))); }},
      {"dary-bounds", {"d", "z", "t"},
       [](const P& p) {
         const auto b = oracle::dary_phi_bounds(count(p, "d"), number(p, "z"), number(p, "t"));
         return ordered_json{{"lower", b.lower}, {"upper", b.upper}, {"epsilon_d", b.epsilon_d}};
       }},
      {"pgw-phi", {"c", "z", "t"},
       [](const P& p) {
         return ordered_json(oracle::pgw_phi(number(p, "c"), number(p, "z"), number(p, "t")));
       }},
      {"pgw-solvent", {"c", "t"},
       [](const P& p) { return ordered_json(oracle::pgw_solvent_prob(number(p, "c"), number(p, "t"))); }},
      {"pgw-pmf", {"c", "t", "k"},
       [](const P& p) {
         return ordered_json(
             oracle::pgw_conditional_pmf(number(p, "c"), number(p, "t"), count(p, "k")));
       }},
      {"er-density", {"c"},
       [](const P& p) { return ordered_json(oracle::er_limit_density(number(p, "c"))); }},
      {"mf-variance-bound", {"nu_star", "lipschitz", "t"},
       [](const P& p) {
         return ordered_json(oracle::mf_variance_bound(number(p, "nu_star"),
                                                       number(p, "lipschitz"), number(p, "t")));
       }},
  };
  return table;
}

}  // namespace

SolveConfig parse_solve_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  SolveConfig c;
  for (const auto& [name, section] : tree) {
    if (name != "solve") throw ConfigError("unknown section or top-level key '" + name + "'");
    std::map<std::string, std::string> kv;
    for (const auto& [key, value] : section) kv[key] = value.data();
    for (const auto& [key, value] : kv) {
      if (key == "family") c.family = value;
      else if (key == "d") c.d = count(kv, key);
      else if (key == "r") c.r = count(kv, key);
      else if (key == "mean") c.mean = number(kv, key);
      else if (key == "pmf") c.pmf = parse_real_list(value);
      else if (key == "tree_file") c.tree_file = value;
      else if (key == "root") c.root = static_cast<AgentId>(count(kv, key));
      else if (key == "z_points") c.grid.z_points = count(kv, key);
      else if (key == "t_step") c.grid.t_step = number(kv, key);
      else if (key == "t_max") c.grid.t_max = number(kv, key);
      else if (key == "output_dir") c.output_dir = value;
      else throw ConfigError("unknown key 'solve." + key + "'");
    }
  }
  validate(c);
  return c;
}

void validate(const SolveConfig& c) {
  static const std::vector<std::string> families{"tree-file", "dary", "regular", "gw-poisson",
                                                 "gw-pmf"};
  if (std::find(families.begin(), families.end(), c.family) == families.end())
    throw ConfigError("unknown solve family '" + c.family + "'");
  try {
    c.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.family == "dary" && c.d < 1) throw ConfigError("d must be >= 1");
  if (c.family == "regular" && c.r < 2) throw ConfigError("r must be >= 2");
  if (c.family == "gw-poisson" && !(c.mean >= 0.0)) throw ConfigError("mean must be >= 0");
  if (c.family == "gw-pmf" && c.pmf.empty()) throw ConfigError("gw-pmf needs a pmf");
  if (c.family == "tree-file" && c.tree_file.empty()) throw ConfigError("tree-file needs tree_file");
}

nlohmann::ordered_json to_json(const SolveConfig& c) {
  ordered_json out;
  out["family"] = c.family;
  if (c.family == "dary") out["d"] = c.d;
  if (c.family == "regular") out["r"] = c.r;
  if (c.family == "gw-poisson") out["mean"] = c.mean;
  if (c.family == "gw-pmf") out["pmf"] = c.pmf;
  if (c.family == "tree-file") {
    out["tree_file"] = c.tree_file.generic_string();
    out["root"] = c.root;
  }
  out["z_points"] = c.grid.z_points;
  out["t_step"] = c.grid.t_step;
  out["t_max"] = c.grid.t_max;
  out["output_dir"] = c.output_dir.generic_string();
  return out;
}

SolveOutput run_solve(const SolveConfig& c) {
  validate(c);
  const auto& grid = c.grid;
  const auto table = solve_on(c, grid);
  const auto fine = solve_on(c, grid.refined());
  const std::size_t last = grid.t_points() - 1;

  SolveOutput out;
  out.table.name = "phi";
  out.table.header.push_back("t");
  for (std::size_t zi = 0; zi < grid.z_points; ++zi)
    out.table.header.push_back("z=" + format_number(grid.z(zi)));
  for (std::size_t ti = 0; ti < grid.t_points(); ++ti) {
    std::vector<std::string> row{format_number(grid.t(ti))};
    for (std::size_t zi = 0; zi < grid.z_points; ++zi) row.push_back(format_number(table.phi(zi, ti)));
    out.table.rows.push_back(std::move(row));
  }

  const double coarse_value = table.phi(0, last);
  const double fine_value = fine.phi(0, 2 * last);
  auto& s = out.summary;
  s["version"] = version_string();
  s["config"] = to_json(c);
  s["solvent_probability"] = coarse_value;
  s["richardson"] = {{"coarse", coarse_value},
                     {"fine", fine_value},
                     {"error", std::abs(coarse_value - fine_value) / 3.0}};
  s["invariants_ok"] = table.satisfies_invariants(1e-9);

  if (c.family == "gw-poisson") {
    double worst = 0.0;
    for (std::size_t ti = 0; ti < grid.t_points(); ++ti)
      for (std::size_t zi = 0; zi < grid.z_points; ++zi)
        worst = std::max(worst, std::abs(table.phi(zi, ti) -
                                         oracle::pgw_phi(c.mean, grid.z(zi), grid.t(ti))));
    s["closed_form_max_error"] = worst;
  }
  if (c.family == "dary") {
    double worst = -1.0;
    for (std::size_t ti = 0; ti < grid.t_points(); ++ti)
      for (std::size_t zi = 0; zi < grid.z_points; ++zi) {
        const auto b = oracle::dary_phi_bounds(c.d, grid.z(zi), grid.t(ti));
        worst = std::max({worst, b.lower - table.phi(zi, ti), table.phi(zi, ti) - b.upper});
      }
    s["bounds_max_violation"] = worst;
  }
  if (c.family == "regular" && c.r >= 3) {
    const auto inner = solver::solve_dary_fixed_point(c.r - 1, grid);
    const double eps = oracle::epsilon_d(c.r - 1);
    double worst = -1.0;
    for (std::size_t ti = 0; ti < grid.t_points(); ++ti)
      for (std::size_t zi = 0; zi < grid.z_points; ++zi) {
        const double v = table.phi(zi, ti), p = inner.phi(zi, ti);
        worst = std::max({worst, (1.0 - eps) * p - v, v - p});
      }
    s["sandwich"] = {{"lower", (1.0 - eps) * inner.phi(0, last)},
                     {"value", coarse_value},
                     {"upper", inner.phi(0, last)},
                     {"max_violation", worst},
                     {"holds", worst <= 1e-12}};
  }
  return out;
}

void write_outputs(const SolveConfig& config, const SolveOutput& output) {
  std::ostringstream csv;
  write_csv(csv, output.table);
  const auto stem = config.output_dir / ("solve_" + config.family);
  write_text_file(std::filesystem::path(stem).concat(".csv"), csv.str());
  write_text_file(std::filesystem::path(stem).concat(".json"), dump_json(output.summary));
}

const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : oracle_table()) out.push_back(e.name);
    return out;
  }();
  return names;
}

nlohmann::ordered_json evaluate_oracle(const std::string& name,
                                       const std::map<std::string, std::string>& params) {
  for (const auto& entry : oracle_table()) {
    if (entry.name != name) continue;
    ordered_json p = ordered_json::object();
    for (const auto& [key, value] : params) {
      if (std::find(entry.params.begin(), entry.params.end(), key) == entry.params.end())
        throw ConfigError("oracle '" + name + "' has no parameter '" + key + "'");
    }
    for (const auto& key : entry.params) p[key] = number(params, key);
    ordered_json out;
    out["name"] = name;
    out["params"] = p;
    try {
      out["value"] = entry.eval(params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return out;
  }
  throw ConfigError("unknown oracle '" + name + "'");
}

std::map<std::string, std::string> parse_assignments(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace cg::app
