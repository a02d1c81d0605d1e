#pragma once

// Scenario files for the runner.
//
// A scenario is an INI file with one section per component:
//
//   [scenario]        kind = mz | stern_gerlach, seed
//   [interferometer]  phase, recoil, input_port, absolute_units, n_phase
//   [bs_in] [bs_out]  t, r, recoil, p0, sigma, half_span, n_points (+ enabled)
//   [ww]              enabled, arm = reflected | transmitted, gamma
//   [stern_gerlach]   a1, a2, shots
//   [output]          path, format = csv | json
//   [sweep] [sweep2]  parameter, start, stop, steps
//
// half_span is in units of sigma. recoil is in units of each splitter's sigma
// unless interferometer.absolute_units = true. Complex values are written
// "re" or "re,im". Internally the file is a flat
// map of dotted keys ("bs_in.t"), which is also the syntax for overrides and
// sweep parameters.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wwsim/collapse.hpp"
#include "wwsim/interferometer.hpp"

namespace wwsim::runner {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { mz, stern_gerlach };
enum class OutputFormat { csv, json };

struct Sweep {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  int steps = 2;

  double value(int step) const;
};

class ScenarioFile {
 public:
  // Throws ParseError on INI syntax errors.
  static ScenarioFile parse(std::string_view text);
  // Throws IoError if the file cannot be read, ParseError otherwise.
  static ScenarioFile load(const std::filesystem::path& path);

  // Applies "section.key=value". Throws ParseError on a malformed assignment
  // or a key the schema does not know.
  void apply_override(std::string_view assignment);
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void erase(const std::string& key) { values_.erase(key); }

  std::optional<std::string> get(const std::string& key) const;
  bool has_section(std::string_view section) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Everything needed to execute one scenario point.
struct Scenario {
  ScenarioKind kind = ScenarioKind::mz;
  std::uint64_t seed = 0;
  InterferometerConfig interferometer;
  int n_phase = 360;
  Complex a1 = 1.0;
  Complex a2 = 0.0;
  std::uint64_t shots = 1000;
  std::optional<std::filesystem::path> output_path;
  OutputFormat format = OutputFormat::csv;
  std::vector<Sweep> sweeps;
};

// Invariant violations of the file, without executing anything. Throws
// ParseError when a value does not parse as its declared type.
std::vector<std::string> validate(const ScenarioFile& file);

// Typed view of the file. Throws ParseError, or DomainError listing the
// diagnostics when validation fails.
Scenario interpret(const ScenarioFile& file);

// Whether `key` names a value the scenario schema accepts at all.
bool known_key(std::string_view key);

// Whether `key` holds an integer (sweep values are rounded for these).
bool integer_key(std::string_view key);

// Shortest text that reads back as the same double.
std::string format_value(double value);

}  // namespace wwsim::runner
