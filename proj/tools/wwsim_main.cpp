#include <iostream>

#include <CLI11.hpp>

#include "wwsim/runner/runner.hpp"

using namespace wwsim::runner;

int main(int argc, char** argv) {
  CLI::App app{"Which-way interferometer and measurement simulator"};
  app.require_subcommand(1);

  std::string scenario;
  RunOptions options;
  std::string output, format;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Execute a scenario file");
  run->add_option("file", scenario, "Scenario file")->required();
  run->add_option("--set", options.overrides, "Override a value, key=value (repeatable, last wins)");
  auto* output_opt = run->add_option("--output", output, "Write results here instead of stdout");
  auto* format_opt = run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = run->add_option("--seed", seed, "Sampling seed");

  auto* check = app.add_subcommand("validate", "Report invariant violations without running");
  check->add_option("file", scenario, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::parse;
  }

  if (*check) return validate_command(scenario, std::cout, std::cerr);

  if (*output_opt) options.output = output;
  if (*format_opt) options.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (*seed_opt) options.seed = seed;
  return run_command(scenario, options, std::cout, std::cerr);
}
