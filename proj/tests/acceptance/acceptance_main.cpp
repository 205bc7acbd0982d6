// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--suite fast|full] [--seed N] [--threads N]

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

#include "cg/app/validation.hpp"

int main(int argc, char** argv) {
  cg::app::ValidationOptions options;
  options.suite = cg::app::Suite::Full;
  for (int k = 1; k < argc; ++k) {
    const std::string_view arg = argv[k];
    const bool has_value = k + 1 < argc;
    if (arg == "--suite" && has_value) {
      options.suite = cg::app::parse_suite(argv[++k]);
    } else if (arg == "--seed" && has_value) {
      options.seed = std::strtoull(argv[++k], nullptr, 10);
    } else if (arg == "--threads" && has_value) {
      options.threads = std::strtoull(argv[++k], nullptr, 10);
    } else {
      std::cerr << "usage: acceptance [--suite fast|full] [--seed N] [--threads N]\n";
      return 2;
    }
  }
  options.on_result = [](const cg::app::CriterionResult& r) {
    std::cout << cg::app::format_line(r) << std::endl;
  };
  const auto report = cg::app::run_validation(options);
  std::size_t failed = 0;
  for (const auto& c : report.criteria) failed += c.passed ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << "\n";
  return failed == 0 ? 0 : 1;
}
