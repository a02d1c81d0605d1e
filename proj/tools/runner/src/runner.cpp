#include "wwsim/runner/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wwsim/error.hpp"

#ifndef WWSIM_VERSION
#define WWSIM_VERSION "unknown"
#endif

namespace wwsim::runner {

namespace {

const std::string phase_key = "interferometer.phase";

struct Point {
  std::vector<double> values;  // one per sweep, as applied
  ScenarioFile file;
};

double applied_value(const std::string& key, double v) {
  return integer_key(key) ? static_cast<double>(std::llround(v)) : v;
}

std::vector<Point> expand(const ScenarioFile& file, const std::vector<Sweep>& sweeps) {
  std::size_t total = 1;
  for (const auto& s : sweeps) total *= static_cast<std::size_t>(s.steps);

  std::vector<Point> points;
  points.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point p{std::vector<double>(sweeps.size()), file};
    std::size_t rest = flat;
    for (std::size_t k = sweeps.size(); k-- > 0;) {
      const auto steps = static_cast<std::size_t>(sweeps[k].steps);
      const double v = applied_value(sweeps[k].parameter, sweeps[k].value(static_cast<int>(rest % steps)));
      rest /= steps;
      p.values[k] = v;
      p.file.set(sweeps[k].parameter, integer_key(sweeps[k].parameter) ? std::to_string(std::llround(v)) : format_value(v));
    }
    points.push_back(std::move(p));
  }
  return points;
}

nlohmann::json momentum_json(const BeamSplitterMomentum& m) {
  nlohmann::json j{{"mean_shift", m.mean_shift}, {"recoil_overlap", m.recoil_overlap}};
  j["mean_shift_port3"] = m.mean_shift_port3 ? nlohmann::json(*m.mean_shift_port3) : nlohmann::json(nullptr);
  j["mean_shift_port4"] = m.mean_shift_port4 ? nlohmann::json(*m.mean_shift_port4) : nlohmann::json(nullptr);
  return j;
}

void run_mz(const Scenario& base, const std::vector<Point>& points, ResultTable& table) {
  const auto& sweeps = base.sweeps;
  std::ptrdiff_t phase_index = -1;
  for (std::size_t k = 0; k < sweeps.size(); ++k)
    if (sweeps[k].parameter == phase_key) phase_index = static_cast<std::ptrdiff_t>(k);

  table.columns.push_back("p3");
  table.columns.push_back("p4");
  if (phase_index < 0) table.columns.push_back("visibility");

  nlohmann::json visibilities = nlohmann::json::array();
  for (const auto& point : points) {
    const Scenario s = interpret(point.file);
    const auto p = output_probabilities(s.interferometer);
    std::vector<double> row = point.values;
    row.push_back(p.p3);
    row.push_back(p.p4);
    if (phase_index < 0) {
      row.push_back(visibility(s.interferometer, s.n_phase));
    } else if (point.values[static_cast<std::size_t>(phase_index)] == sweeps[static_cast<std::size_t>(phase_index)].start) {
      // One visibility per setting of the other swept parameters.
      nlohmann::json entry = nlohmann::json::object();
      for (std::size_t k = 0; k < sweeps.size(); ++k)
        if (static_cast<std::ptrdiff_t>(k) != phase_index) entry[sweeps[k].parameter] = point.values[k];
      entry["visibility"] = visibility(s.interferometer, s.n_phase);
      visibilities.push_back(std::move(entry));
    }
    table.rows.push_back(std::move(row));
  }

  if (phase_index >= 0) {
    if (sweeps.size() == 1) table.metadata["visibility"] = visibilities.front()["visibility"];
    else table.metadata["visibility"] = std::move(visibilities);
  }
  const auto report = momentum_transfer_report(base.interferometer);
  table.metadata["momentum_transfer"] = {{"bs_in", momentum_json(report.bs_in)}, {"bs_out", momentum_json(report.bs_out)}};
}

void run_stern_gerlach(const std::vector<Point>& points, ResultTable& table) {
  for (const auto* c : {"outcome", "eigenvalue", "probability", "count", "frequency"}) table.columns.emplace_back(c);
  for (const auto& point : points) {
    const Scenario s = interpret(point.file);
    const auto spec = stern_gerlach_spec(s.a1, s.a2);
    const auto psi = entangle(spec);
    const auto probabilities = outcome_probabilities(psi, spec);
    const auto counts = sample_outcomes(psi, spec, s.shots, s.seed);
    for (std::size_t j = 0; j < spec.branches(); ++j) {
      std::vector<double> row = point.values;
      row.insert(row.end(), {static_cast<double>(j + 1), spec.eigenvalues[j], probabilities[j],
                             static_cast<double>(counts.counts[j]), counts.frequency(j)});
      table.rows.push_back(std::move(row));
    }
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return exit_code::domain;
  } catch (const wwsim::Error& e) {
    err << "domain error: " << e.what() << '\n';
    return exit_code::domain;
  }
}

}  // namespace

ResultTable execute(const ScenarioFile& file) {
  const Scenario base = interpret(file);

  ResultTable table;
  for (const auto& s : base.sweeps) table.columns.push_back(s.parameter);
  table.metadata["tool"] = "wwsim";
  table.metadata["version"] = WWSIM_VERSION;
  table.metadata["kind"] = base.kind == ScenarioKind::mz ? "mz" : "stern_gerlach";
  table.metadata["seed"] = base.seed;
  table.metadata["scenario"] = file.values();

  const auto points = expand(file, base.sweeps);
  if (base.kind == ScenarioKind::mz) run_mz(base, points, table);
  else run_stern_gerlach(points, table);
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (const auto& [key, value] : table.metadata.items()) out += "# " + key + ": " + value.dump() + '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += '\n';
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) r[table.columns[c]] = row[c];
    rows.push_back(std::move(r));
  }
  nlohmann::json doc{{"metadata", table.metadata}, {"columns", table.columns}, {"rows", std::move(rows)}};
  return doc.dump(2) + '\n';
}

int run_command(const std::filesystem::path& scenario, const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioFile file = ScenarioFile::load(scenario);
    for (const auto& o : options.overrides) file.apply_override(o);
    if (options.seed) file.set("scenario.seed", std::to_string(*options.seed));
    if (options.format) file.set("output.format", *options.format == OutputFormat::json ? "json" : "csv");
    if (options.output) file.set("output.path", options.output->string());

    const Scenario s = interpret(file);
    const ResultTable table = execute(file);
    const std::string text = s.format == OutputFormat::json ? to_json(table) : to_csv(table);
    if (s.output_path) write_file(*s.output_path, text);
    else out << text;
    return exit_code::ok;
  });
}

int validate_command(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto diagnostics = validate(ScenarioFile::load(scenario));
    for (const auto& d : diagnostics) out << d << '\n';
    return diagnostics.empty() ? exit_code::ok : exit_code::domain;
  });
}

}  // namespace wwsim::runner
