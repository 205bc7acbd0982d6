#include "cg/app/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cg::app {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buffer, ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const Table& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k > 0) out << ',';
      out << csv_field(fields[k]);
    }
    out << "\r\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

Table curve_table(std::string name, std::span<const double> times,
                  std::span<const stats::EstimateCI> values) {
  Table t{std::move(name), {"time", "mean", "std_error", "n"}, {}};
  for (std::size_t k = 0; k < times.size() && k < values.size(); ++k)
    t.rows.push_back({format_number(times[k]), format_number(values[k].mean),
                      format_number(values[k].std_error),
                      std::to_string(values[k].n_replicates)});
  return t;
}

nlohmann::ordered_json to_json(const stats::EstimateCI& e) {
  nlohmann::ordered_json out;
  out["mean"] = e.mean;
  out["std_error"] = e.std_error;
  out["n"] = e.n_replicates;
  return out;
}

nlohmann::ordered_json to_json(const stats::EstimateCI& e, double oracle) {
  auto out = to_json(e);
  out["oracle"] = oracle;
  out["z_score"] = e.z_score(oracle);
  return out;
}

nlohmann::ordered_json to_json(const stats::ChiSquare& c) {
  nlohmann::ordered_json out;
  out["statistic"] = c.statistic;
  out["dof"] = c.dof;
  out["p_value"] = c.p_value;
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string dump_json(const nlohmann::ordered_json& value) {
  return value.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

}  // namespace cg::app
