#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sqg/cli/experiment.hpp"
#include "sqg/error.hpp"

using namespace sqg;
using namespace sqg::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "sqglab-test-cli" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

ExperimentConfig make(const std::string& text) { return ExperimentConfig::from_json(Json::parse(text)); }

}  // namespace

TEST_CASE("config defaults and echo") {
  const auto c = make(R"({"experiment": "solve"})");
  CHECK(c.experiment == Experiment::solve);
  CHECK(c.lattice_size == 64);
  CHECK(c.seed == 1);
  CHECK(c.params.at("forcing").at("delta0_fraction") == 0.5);
  CHECK(c.params.at("sign") == "pde");
  // The echo parses back to the same configuration.
  const auto again = ExperimentConfig::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());

  const auto s = make(R"({"experiment": "illpose-step2", "params": {"q": [2, "inf"]}})");
  CHECK(s.params.at("q") == Json::array({2.0, "inf"}));
  CHECK(experiment_names().size() == 7);
  for (const auto& n : experiment_names()) CHECK(to_string(parse_experiment(n)) == n);
}

TEST_CASE("validation rejects before compute with distinct messages") {
  const std::vector<std::string> bad = {
      R"({})",
      R"({"experiment": "bogus"})",
      R"({"experiment": "solve", "colour": 1})",
      R"({"experiment": "solve", "params": {"colour": 1}})",
      R"({"experiment": "solve", "lattice": {"M": 48}})",
      R"({"experiment": "solve", "lattice": {"h": -1.0}})",
      R"({"experiment": "solve", "threads": 0})",
      R"({"experiment": "solve", "seed": -3})",
      R"({"experiment": "solve", "params": {"max_iter": 4.5}})",
      R"({"experiment": "solve", "params": {"tol": 0}})",
      R"({"experiment": "solve", "params": {"q": 0.5}})",
      R"({"experiment": "solve", "params": {"p": 0.5}})",
      R"({"experiment": "solve", "params": {"sign": "plus"}})",
      R"({"experiment": "solve", "params": {"forcing": {"samples": 10}}})",
      R"({"experiment": "solve", "params": {"forcing": {"r_min": 3.0, "r_max": 1.0}}})",
      R"({"experiment": "partition-check", "params": {"inner": 1.0}})",
      R"({"experiment": "verify-identity", "lattice": {"M": 256}})",
      R"({"experiment": "verify-identity", "params": {"fields": 0}})",
      R"({"experiment": "constants", "params": {"samples": 49}})",
      R"({"experiment": "constants", "params": {"shell_high": 9}})",
      R"({"experiment": "illpose-step1", "params": {"N": [40]}})",
      R"({"experiment": "illpose-step1", "lattice": {"h": 0.5}})",
      R"({"experiment": "illpose-step1", "params": {"j_high": 0}})",
      R"({"experiment": "illpose-step1", "params": {"delta": -1}})",
      R"({"experiment": "illpose-step2", "params": {"exponent": {"kind": "affine", "slope": 1}}})",
      R"({"experiment": "illpose-step2", "params": {"exponent": {"kind": "spiral"}}})",
      R"({"experiment": "illpose-step2", "params": {"q": ["huge"]}})",
      R"({"experiment": "illpose-step2", "params": {"probe_radius": 2.0}})",
      R"({"experiment": "illpose-step3", "params": {"carrier": 4}})",
      R"({"experiment": "illpose-step3", "params": {"probe_gap": 2}})",
      R"({"experiment": "illpose-step3", "lattice": {"M": 64}})",
  };
  std::set<std::string> messages;
  for (const auto& text : bad) {
    CAPTURE(text);
    std::string msg;
    try {
      make(text);
    } catch (const PreconditionError& e) {
      msg = e.what();
    }
    CHECK(!msg.empty());
    messages.insert(msg);
  }
  CHECK(messages.size() == bad.size());
}

TEST_CASE("partition-check on defaults") {
  auto c = make(R"({"experiment": "partition-check"})");
  c.output = scratch("partition");
  const auto rep = run_experiment(c);
  CHECK(rep.passed());
  const auto& t = rep.table("partition");
  CHECK(t.rows.size() == static_cast<std::size_t>(rep.summary.at("j_max").get<int>() -
                                                  rep.summary.at("j_min").get<int>() + 1));
  CHECK(rep.checks.size() == 5);
  for (const auto& ch : rep.checks) {
    CHECK(ch.relation == "<=");
    CHECK(ch.threshold == 1e-12);
  }
}

TEST_CASE("verify-identity on 32^2 with 50 fields") {
  auto c = make(R"({"experiment": "verify-identity", "lattice": {"M": 32, "h": 0.25}})");
  const auto rep = run_experiment(c);
  CHECK(rep.passed());
  CHECK(rep.table("identity").rows.size() == 50);
  CHECK(rep.summary.at("max_discrepancy").get<double>() <= 1e-10);
  CHECK(rep.checks.at(0).threshold == 1e-10);

  // A tolerance nobody meets is a failed verdict, not an error.
  auto strict = make(R"({"experiment": "verify-identity", "params": {"fields": 2, "tolerance": 1e-300}})");
  CHECK(!run_experiment(strict).passed());
}

TEST_CASE("illpose-step1 sweep") {
  auto c = make(R"({"experiment": "illpose-step1", "lattice": {"M": 256, "h": 0.25},
                    "params": {"N": [3, 4], "p": 8}})");
  const auto rep = run_experiment(c);
  CHECK(rep.passed());
  const auto& t = rep.table("step1");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1].get<double>() < t.rows[0][1].get<double>());
  CHECK(t.rows[0][5].get<double>() > 0.0);
}

TEST_CASE("resource overflow aborts cleanly") {
  auto c = make(R"({"experiment": "partition-check", "lattice": {"M": 65536, "h": 0.25}})");
  c.output = scratch("abort");
  const auto rep = run_experiment(c);
  REQUIRE(rep.aborted.has_value());
  CHECK(!rep.passed());
  emit_report(rep, Format::json);
  const auto j = Json::parse(slurp(c.output / "report.json"));
  CHECK(j.at("status") == "aborted");
  CHECK(j.at("passed") == false);
}

TEST_CASE("emission: determinism, cross-format agreement, empty tables") {
  auto c = make(R"({"experiment": "solve", "lattice": {"M": 32, "h": 0.25}, "seed": 7})");
  c.output = scratch("solve");
  const auto first = run_experiment(c);
  REQUIRE(first.passed());
  const auto a = emit_report(first, Format::csv);
  const auto b = emit_report(first, Format::json);
  std::map<fs::path, std::string> before;
  for (const auto& p : a) before[p] = slurp(p);
  for (const auto& p : b) before[p] = slurp(p);

  const auto second = run_experiment(c);
  emit_report(second, Format::csv);
  emit_report(second, Format::json);
  for (const auto& [p, text] : before) {
    if (p.filename() == "timing.json") continue;
    CAPTURE(p.string());
    CHECK(slurp(p) == text);
  }

  // JSON and CSV carry the same 17-digit numbers.
  const auto j = Json::parse(slurp(c.output / "report.json"));
  const auto csv = read_csv(c.output / "trace.csv");
  const auto& rows = j.at("tables").at("trace").at("rows");
  REQUIRE(csv.size() == rows.size() + 1);
  CHECK(csv[0] == std::vector<std::string>{"iteration", "norm", "residual", "ratio", "pde_residual"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      const Json& v = rows[i][k];
      const std::string expect = v.is_null() ? "" : v.is_number_float() ? format_number(v.get<double>()) : v.dump();
      CHECK(csv[i + 1][k] == expect);
    }
  }
  const auto checks = read_csv(c.output / "checks.csv");
  REQUIRE(checks.size() == j.at("checks").size() + 1);
  for (std::size_t i = 0; i < j.at("checks").size(); ++i) {
    CHECK(checks[i + 1][2] == format_number(j.at("checks")[i].at("value").get<double>()));
    CHECK(checks[i + 1][4] == format_number(j.at("checks")[i].at("threshold").get<double>()));
  }

  ExperimentReport empty;
  empty.config = c;
  empty.config.output = scratch("empty");
  empty.tables.push_back(Table{"nothing", {"a", "b"}, {}});
  emit_report(empty, Format::csv);
  CHECK(slurp(empty.config.output / "nothing.csv") == "a,b\n");
}

TEST_CASE("unwritable output path") {
  const fs::path blocker = scratch("blocker");
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file";
  ExperimentReport rep;
  rep.config.output = blocker / "sub";
  CHECK_THROWS_AS(emit_report(rep, Format::csv), Error);
}

TEST_CASE("format_number") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
  CHECK(format_number(std::nan("")) == "nan");
}
