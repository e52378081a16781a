#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sqg/cli/experiment.hpp"
#include "sqg/error.hpp"

namespace sqg::cli {

namespace {

void write_scalar(std::ostream& out, const Json& v) {
  if (v.is_number_float()) {
    const double x = v.get<double>();
    out << (std::isfinite(x) ? format_number(x) : "null");
  } else {
    out << v.dump();
  }
}

bool all_scalar(const Json& j) {
  for (const auto& v : j)
    if (v.is_structured()) return false;
  return true;
}

// JSON writer with 17-digit floats; arrays of scalars stay on one line.
void write_json(std::ostream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (const auto& item : j.items()) {
      if (!first) out << ",\n";
      first = false;
      out << pad << Json(item.key()).dump() << ": ";
      write_json(out, item.value(), indent + 2);
    }
    out << "\n" << close << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out << "[]";
    } else if (all_scalar(j)) {
      out << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ", ";
        write_scalar(out, j[i]);
      }
      out << "]";
    } else {
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write_json(out, j[i], indent + 2);
      }
      out << "\n" << close << "]";
    }
  } else {
    write_scalar(out, j);
  }
}

std::string csv_field(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  if (v.is_structured()) return csv_field(Json(v.dump()));
  return v.dump();
}

void write_csv_row(std::ostream& out, const std::vector<Json>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ",";
    out << csv_field(row[i]);
  }
  out << "\n";
}

Json check_json(const Check& c) {
  Json j = Json::object();
  j["name"] = c.name;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["relation"] = c.relation;
  j["threshold"] = c.threshold;
  if (c.relation == "in") j["threshold_high"] = c.threshold_high;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("emit_report: cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error("emit_report: write failed for " + path.string());
  written.push_back(path);
}

std::string json_text(const Json& j) {
  std::ostringstream out;
  write_json(out, j, 0);
  out << "\n";
  return out.str();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json ExperimentReport::to_json() const {
  Json j = Json::object();
  j["status"] = aborted ? "aborted" : "complete";
  if (aborted) j["abort_reason"] = *aborted;
  j["passed"] = passed();
  j["config"] = config.to_json();
  j["summary"] = summary;
  Json checks_json = Json::array();
  for (const auto& c : checks) checks_json.push_back(check_json(c));
  j["checks"] = checks_json;
  Json ts = Json::object();
  for (const auto& t : tables) {
    Json rows = Json::array();
    for (const auto& r : t.rows) rows.push_back(Json(r));
    ts[t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  j["tables"] = ts;
  return j;
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, Format format) {
  namespace fs = std::filesystem;
  const fs::path dir = report.config.output;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("emit_report: cannot create output directory " + dir.string());

  std::vector<fs::path> written;
  if (format == Format::json) {
    write_file(dir / "report.json", json_text(report.to_json()), written);
  } else {
    write_file(dir / "config.json", json_text(report.config.to_json()), written);
    for (const auto& t : report.tables) {
      std::ostringstream out;
      std::vector<Json> header(t.columns.begin(), t.columns.end());
      write_csv_row(out, header);
      for (const auto& r : t.rows) write_csv_row(out, r);
      write_file(dir / (t.name + ".csv"), out.str(), written);
    }
    std::ostringstream checks;
    checks << "name,passed,value,relation,threshold,threshold_high\n";
    for (const auto& c : report.checks) {
      write_csv_row(checks, {c.name, c.passed, c.value, c.relation, c.threshold,
                             c.relation == "in" ? Json(c.threshold_high) : Json(nullptr)});
    }
    write_file(dir / "checks.csv", checks.str(), written);
    std::ostringstream summary;
    summary << "key,value\n";
    write_csv_row(summary, {"status", report.aborted ? "aborted" : "complete"});
    if (report.aborted) write_csv_row(summary, {"abort_reason", *report.aborted});
    write_csv_row(summary, {"passed", report.passed()});
    for (const auto& item : report.summary.items()) write_csv_row(summary, {item.key(), item.value()});
    write_file(dir / "summary.csv", summary.str(), written);
  }
  Json timing = Json::object();
  timing["wall_seconds"] = report.wall_seconds;
  write_file(dir / "timing.json", json_text(timing), written);
  return written;
}

}  // namespace sqg::cli
