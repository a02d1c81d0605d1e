#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wwsim/runner/scenario.hpp"

namespace wwsim::runner {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse = 2;
inline constexpr int domain = 3;
inline constexpr int io = 4;
}  // namespace exit_code

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::json metadata = nlohmann::json::object();
};

// Runs every sweep point of the file in sweep-index order (last sweep
// fastest). Throws ParseError, DomainError or wwsim::Error.
ResultTable execute(const ScenarioFile& file);

// 17 significant digits, '.' decimal point, '\n' line ends. Metadata goes
// first as "# key: <json>" comment lines.
std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);

struct RunOptions {
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> output;
  std::optional<OutputFormat> format;
  std::optional<std::uint64_t> seed;
};

// Command bodies. Results go to `out` unless an output path is set; messages
// go to `err`. Return the process exit code.
int run_command(const std::filesystem::path& scenario, const RunOptions& options, std::ostream& out, std::ostream& err);
int validate_command(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

}  // namespace wwsim::runner
