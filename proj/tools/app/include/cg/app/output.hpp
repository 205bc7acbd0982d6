#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cg/stats.hpp"
#include "json.hpp"

namespace cg::app {

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Quotes a field when it contains a comma, quote, CR or LF; quotes are doubled.
std::string csv_field(std::string_view text);

void write_csv(std::ostream& out, const Table& table);

/// Curve table with columns time,mean,std_error,n.
Table curve_table(std::string name, std::span<const double> times,
                  std::span<const stats::EstimateCI> values);

nlohmann::ordered_json to_json(const stats::EstimateCI& e);
/// Estimate plus its oracle target and z-score.
nlohmann::ordered_json to_json(const stats::EstimateCI& e, double oracle);
nlohmann::ordered_json to_json(const stats::ChiSquare& c);

/// Writes the text atomically enough for our purposes: to a temporary file
/// in the same directory, then renamed.
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string dump_json(const nlohmann::ordered_json& value);

}  // namespace cg::app
