#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sqg/cli/experiment.hpp"
#include "sqg/error.hpp"

namespace {

enum Exit { ok = 0, failed_check = 1, bad_config = 2, aborted = 3, output_error = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace sqg::cli;
  CLI::App app{"Batch experiment runner for the stationary QG library"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "both";

  for (const auto& name : experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("-s,--seed", seed, "Random seed (overrides the config)");
    sub->add_option("-t,--threads", threads, "FFT threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("-f,--format", format, "Report format")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }
  CLI11_PARSE(app, argc, argv);
  const std::string verb = app.get_subcommands().front()->get_name();

  ExperimentConfig config;
  try {
    Json j = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      j = Json::parse(in);
      if (!j.is_object()) throw sqg::PreconditionError("config: expected a JSON object");
    }
    if (j.contains("experiment") && j.at("experiment") != verb) {
      throw sqg::PreconditionError("config.experiment: '" + j.at("experiment").dump() +
                                   "' does not match the command '" + verb + "'");
    }
    j["experiment"] = verb;
    if (seed) j["seed"] = *seed;
    if (threads) j["threads"] = *threads;
    if (!out_dir.empty()) j["output"] = out_dir;
    config = ExperimentConfig::from_json(j);
  } catch (const Json::parse_error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return bad_config;
  } catch (const sqg::Error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return bad_config;
  }

  ExperimentReport report;
  try {
    report = run_experiment(config);
  } catch (const sqg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bad_config;
  }

  try {
    if (format != "json") emit_report(report, Format::csv);
    if (format != "csv") emit_report(report, Format::json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return output_error;
  }

  for (const auto& c : report.checks) {
    std::printf("%-4s %-28s %s %s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                format_number(c.value).c_str(), c.relation.c_str(), format_number(c.threshold).c_str());
  }
  if (report.aborted) {
    std::printf("ABORTED %s\n", report.aborted->c_str());
    return aborted;
  }
  std::printf("%s in %.1f s, report in %s\n", report.passed() ? "passed" : "failed", report.wall_seconds,
              config.output.string().c_str());
  return report.passed() ? ok : failed_check;
}
