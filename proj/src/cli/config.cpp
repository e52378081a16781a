#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "cli/internal.hpp"
#include "sqg/bilinear/bilinear.hpp"
#include "sqg/cli/experiment.hpp"
#include "sqg/error.hpp"
#include "sqg/lp/partition.hpp"
#include "sqg/solver/solver.hpp"

namespace sqg::cli {

namespace {

constexpr std::array<std::pair<Experiment, const char*>, 7> names{{
    {Experiment::partition_check, "partition-check"},
    {Experiment::verify_identity, "verify-identity"},
    {Experiment::constants, "constants"},
    {Experiment::solve, "solve"},
    {Experiment::illpose_step1, "illpose-step1"},
    {Experiment::illpose_step2, "illpose-step2"},
    {Experiment::illpose_step3, "illpose-step3"},
}};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw PreconditionError(where + ": " + what);
}

// Reads typed keys with defaults, echoing every value, and rejects unknown keys.
class Reader {
 public:
  Reader(const Json& in, std::string where) : in_(in), where_(std::move(where)) {
    if (!in_.is_object()) fail(where_, "expected an object");
  }

  double number(const char* k, double def) {
    const Json* v = find(k);
    double x = def;
    if (v) {
      if (!v->is_number()) fail(key(k), "expected a number");
      x = v->get<double>();
    }
    out_[k] = x;
    return x;
  }

  std::optional<double> optional_number(const char* k) {
    const Json* v = find(k);
    if (!v) {
      out_[k] = nullptr;
      return std::nullopt;
    }
    if (!v->is_number()) fail(key(k), "expected a number");
    out_[k] = v->get<double>();
    return v->get<double>();
  }

  int integer(const char* k, int def) {
    const Json* v = find(k);
    const int x = v ? as_int(*v, key(k)) : def;
    out_[k] = x;
    return x;
  }

  std::optional<int> optional_integer(const char* k) {
    const Json* v = find(k);
    if (!v) {
      out_[k] = nullptr;
      return std::nullopt;
    }
    out_[k] = as_int(*v, key(k));
    return out_[k].get<int>();
  }

  bool boolean(const char* k, bool def) {
    const Json* v = find(k);
    bool x = def;
    if (v) {
      if (!v->is_boolean()) fail(key(k), "expected true or false");
      x = v->get<bool>();
    }
    out_[k] = x;
    return x;
  }

  std::string string(const char* k, const std::string& def) {
    const Json* v = find(k);
    std::string x = def;
    if (v) {
      if (!v->is_string()) fail(key(k), "expected a string");
      x = v->get<std::string>();
    }
    out_[k] = x;
    return x;
  }

  std::vector<int> integers(const char* k, std::vector<int> def) {
    const Json* v = find(k);
    if (v) {
      if (!v->is_array() || v->empty()) fail(key(k), "expected a non-empty array of integers");
      def.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        def.push_back(as_int((*v)[i], key(k) + "[" + std::to_string(i) + "]"));
    }
    out_[k] = def;
    return def;
  }

  // Summability indices: numbers >= 1 or "inf".
  void exponents(const char* k, const Json& def) {
    const Json* v = find(k);
    const Json& src = v ? *v : def;
    if (!src.is_array() || src.empty()) fail(key(k), "expected a non-empty array of exponents");
    Json echo = Json::array();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const std::string at = key(k) + "[" + std::to_string(i) + "]";
      echo.push_back(exponent_echo(src[i], at));
    }
    out_[k] = echo;
  }

  void exponent(const char* k, const Json& def) {
    const Json* v = find(k);
    out_[k] = exponent_echo(v ? *v : def, key(k));
  }

  Reader nested(const char* k) {
    const Json* v = find(k);
    static const Json empty = Json::object();
    return Reader(v ? *v : empty, key(k));
  }

  void put(const char* k, Json value) { out_[k] = std::move(value); }

  // Marks the key as known and returns it, or null when absent.
  const Json* raw(const char* k) { return find(k); }

  Json finish() {
    for (const auto& item : in_.items())
      if (!used_.count(item.key())) fail(where_, "unknown key '" + item.key() + "'");
    return out_;
  }

  std::string key(const char* k) const { return where_ + "." + k; }

 private:
  const Json* find(const char* k) {
    used_.insert(k);
    const auto it = in_.find(k);
    if (it == in_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  static int as_int(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    const auto x = v.get<long long>();
    if (x < -1000000000LL || x > 1000000000LL) fail(where, "integer out of range");
    return static_cast<int>(x);
  }

  static Json exponent_echo(const Json& v, const std::string& where) {
    if (v.is_string()) {
      if (v.get<std::string>() != "inf") fail(where, "expected a number >= 1 or \"inf\"");
      return "inf";
    }
    if (!v.is_number()) fail(where, "expected a number >= 1 or \"inf\"");
    const double x = v.get<double>();
    if (!(x >= 1.0) || !std::isfinite(x)) fail(where, "exponent must lie in [1, inf]");
    return x;
  }

  const Json& in_;
  std::string where_;
  Json out_ = Json::object();
  std::set<std::string> used_;
};

Json exponent_map_json(Reader r, const char* default_kind, int slope, int offset) {
  const std::string kind = r.string("kind", default_kind);
  if (kind == "square") {
  } else if (kind == "affine") {
    r.integer("slope", slope);
    r.integer("offset", offset);
  } else if (kind == "table") {
    r.integer("first", 1);
    r.integers("values", {});
  } else {
    fail(r.key("kind"), "expected \"square\", \"affine\" or \"table\"");
  }
  return r.finish();
}

struct LatticeDefault {
  int M;
  double h;
};

LatticeDefault default_lattice(Experiment e) {
  switch (e) {
    case Experiment::partition_check: return {64, 0.25};
    case Experiment::verify_identity: return {32, 0.25};
    case Experiment::constants: return {32, 0.25};
    case Experiment::solve: return {64, 0.25};
    case Experiment::illpose_step1: return {2048, 0.25};
    case Experiment::illpose_step2: return {1024, 0.25};
    case Experiment::illpose_step3: return {512, 0.25};
  }
  return {64, 0.25};
}

Json normalize_params(Experiment e, const Json& raw) {
  Reader r(raw, "params");
  switch (e) {
    case Experiment::partition_check:
      r.number("inner", 1.25);
      r.number("outer", 1.75);
      r.number("tolerance", 1e-12);
      r.integer("reconstruction_fields", 4);
      break;
    case Experiment::verify_identity:
      r.integer("fields", 50);
      r.number("r_min", 0.0);
      r.optional_number("r_max");
      r.number("slope", 0.0);
      r.number("p", 4.0);
      r.exponent("q", 2.0);
      r.number("tolerance", 1e-10);
      break;
    case Experiment::constants:
      r.integer("samples", 60);
      r.number("p", 4.0);
      r.exponent("q", 2.0);
      r.optional_integer("shell_low");
      r.optional_integer("shell_high");
      break;
    case Experiment::solve: {
      r.number("p", 4.0);
      r.exponent("q", 2.0);
      r.number("tol", 1e-10);
      r.integer("max_iter", 64);
      r.string("sign", "pde");
      r.number("residual_tolerance", 1e-9);
      r.number("ratio_threshold", 0.55);
      Reader f = r.nested("forcing");
      f.number("r_min", 0.25);
      f.number("r_max", 2.0);
      f.number("slope", 0.0);
      f.optional_number("data_norm");
      f.number("delta0_fraction", 0.5);
      f.integer("samples", 60);
      r.put("forcing", f.finish());
      break;
    }
    case Experiment::illpose_step1:
      r.number("delta", 0.01);
      r.integers("N", {4, 5, 6, 7});
      r.number("p", 8.0);
      r.exponent("q", 2.0);
      r.boolean("solve_perturbation", true);
      r.number("tol", 1e-10);
      r.integer("max_iter", 64);
      r.optional_integer("j_low");
      r.integer("j_high", -1);
      r.number("data_ratio_tolerance", 0.1);
      r.number("lowfreq_variation", 0.25);
      r.number("perturbation_fraction", 0.2);
      r.number("residual_tolerance", 1e-9);
      break;
    case Experiment::illpose_step2:
      r.number("delta", 0.01);
      r.integer("N", 3);
      r.put("exponent", exponent_map_json(r.nested("exponent"), "affine", 2, 0));
      r.integers("terms", {1, 3});
      r.number("p", 4.0);
      r.exponents("q", Json::array({2.0, 4.0, "inf"}));
      r.number("probe_radius", 1.0);
      r.optional_integer("j_low");
      r.integer("j_high", -1);
      r.number("split_tolerance", 1e-10);
      break;
    case Experiment::illpose_step3:
      r.number("delta", 0.01);
      r.integer("N", 3);
      r.put("exponent", exponent_map_json(r.nested("exponent"), "affine", 2, -1));
      r.integers("blocks", {1, 2});
      r.optional_integer("carrier");
      r.optional_number("stride");
      r.number("overlap_tolerance", 0.05);
      r.integer("probe_gap", 3);
      r.number("p", 4.0);
      r.exponent("q", 2.0);
      r.exponents("qs", Json::array({1.0, 2.0, "inf"}));
      r.number("inflation_tolerance", 0.3);
      break;
  }
  return r.finish();
}

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(where, what);
}

void require_positive(const Json& p, const char* k) {
  const double v = p.at(k).get<double>();
  require(v > 0.0 && std::isfinite(v), std::string("params.") + k, "must be positive");
}

void require_fraction(const Json& p, const char* k) {
  const double v = p.at(k).get<double>();
  require(v > 0.0 && v < 1.0, std::string("params.") + k, "must lie in (0, 1)");
}

// Re-raises a module precondition with the config key it came from.
template <class F>
void check(const std::string& where, F&& f) {
  try {
    f();
  } catch (const ResourceLimit&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

void validate_exponents(const Json& p, const char* k) {
  check(std::string("params.") + k, [&] {
    if (p.at(k).is_array()) {
      for (const auto& q : p.at(k)) lp::BesovIndex(0.0, 2.0, exponent_value(q));
    } else {
      lp::BesovIndex(0.0, 2.0, exponent_value(p.at(k)));
    }
  });
}

}  // namespace

const char* to_string(Experiment e) noexcept {
  for (const auto& [x, name] : names)
    if (x == e) return name;
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [x, n] : names)
    if (name == n) return x;
  throw PreconditionError("experiment: unknown name '" + name + "'");
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [x, n] : names) out.emplace_back(n);
  return out;
}

double exponent_value(const Json& v) {
  if (v.is_string()) return lp::infinity;
  return v.get<double>();
}

illposed::ExponentMap exponent_map(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine") return illposed::ExponentMap::affine(j.at("slope"), j.at("offset"));
  if (kind == "table") return illposed::ExponentMap::table(j.at("first"), j.at("values").get<std::vector<int>>());
  return illposed::ExponentMap::square();
}

illposed::ForceSpec force_spec(const ExperimentConfig& c, int N) {
  const Json& p = c.params;
  illposed::ForceSpec s;
  s.delta = p.at("delta").get<double>();
  s.N = N;
  if (c.experiment == Experiment::illpose_step1) {
    s.variant = illposed::Step::step1;
    return s;
  }
  s.exponent = exponent_map(p.at("exponent"));
  if (c.experiment == Experiment::illpose_step2) {
    s.variant = illposed::Step::step2;
    s.block_low = p.at("terms")[0];
    s.block_high = p.at("terms")[1];
    return s;
  }
  s.variant = illposed::Step::step3;
  s.block_low = p.at("blocks")[0];
  s.block_high = p.at("blocks")[1];
  if (!p.at("carrier").is_null()) s.carrier = p.at("carrier").get<int>();
  if (!p.at("stride").is_null()) s.stride = p.at("stride").get<double>();
  s.overlap_tolerance = p.at("overlap_tolerance");
  s.probe_gap = p.at("probe_gap");
  return s;
}

FrequencyLattice ExperimentConfig::lattice() const {
  return FrequencyLattice(lattice_size, lattice_spacing);
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  Reader r(j, "config");
  ExperimentConfig c;
  const std::string name = r.string("experiment", "");
  if (name.empty()) fail("config.experiment", "missing experiment name");
  check("config.experiment", [&] { c.experiment = parse_experiment(name); });

  const auto def = default_lattice(c.experiment);
  Reader lat = r.nested("lattice");
  c.lattice_size = lat.integer("M", def.M);
  c.lattice_spacing = lat.number("h", def.h);
  r.put("lattice", lat.finish());

  const Json* seed = r.raw("seed");
  if (seed && !seed->is_number_unsigned()) fail("config.seed", "expected a non-negative integer");
  c.seed = seed ? seed->get<std::uint64_t>() : 1;
  const std::string output = r.string("output", "");
  if (!output.empty()) c.output = output;
  c.threads = r.integer("threads", 1);

  static const Json empty = Json::object();
  const Json* params = r.raw("params");
  c.params = normalize_params(c.experiment, params ? *params : empty);
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::validate() const {
  check("config.lattice", [&] { (void)lattice(); });
  require(threads >= 1, "config.threads", "must be >= 1");
  const FrequencyLattice lat = lattice();
  const Json& p = params;

  switch (experiment) {
    case Experiment::partition_check:
      check("params.inner/outer", [&] {
        lp::validate_profile({p.at("inner").get<double>(), p.at("outer").get<double>()});
      });
      require_positive(p, "tolerance");
      require(p.at("reconstruction_fields").get<int>() >= 0, "params.reconstruction_fields", "must be >= 0");
      break;
    case Experiment::verify_identity: {
      require(lattice_size <= bilinear::quadrature_limit, "config.lattice.M",
              "verify-identity uses the direct quadrature, which accepts M <= " +
                  std::to_string(bilinear::quadrature_limit));
      require(p.at("fields").get<int>() >= 1, "params.fields", "must be >= 1");
      const double lo = p.at("r_min");
      const double hi = p.at("r_max").is_null() ? 2.0 * lat.nyquist() : p.at("r_max").get<double>();
      require(lo >= 0.0 && hi > lo, "params.r_min/r_max", "band must satisfy 0 <= r_min < r_max");
      require(lo < std::sqrt(2.0) * lat.nyquist() && hi >= lat.spacing(), "params.r_min/r_max",
              "band holds no lattice frequency");
      require(std::isfinite(p.at("slope").get<double>()), "params.slope", "must be finite");
      check("params.p", [&] { lp::BesovIndex::solution(p.at("p"), 2.0); });
      validate_exponents(p, "q");
      require_positive(p, "tolerance");
      break;
    }
    case Experiment::constants: {
      require(p.at("samples").get<int>() >= 50, "params.samples", "estimate_constants needs at least 50 samples");
      check("params.p", [&] { lp::BesovIndex::solution(p.at("p"), 2.0); });
      validate_exponents(p, "q");
      const auto [lo, hi] = solver::sampling_shells(lat);
      const int a = p.at("shell_low").is_null() ? lo : p.at("shell_low").get<int>();
      const int b = p.at("shell_high").is_null() ? hi : p.at("shell_high").get<int>();
      require(a <= b, "params.shell_low/shell_high", "empty shell range");
      require(std::ldexp(1.0, b + 1) <= lat.nyquist(), "params.shell_high",
              "shell support exceeds the Nyquist frequency");
      require(std::ldexp(1.0, a - 1) >= lat.spacing(), "params.shell_low",
              "shell lies below the lattice spacing");
      break;
    }
    case Experiment::solve: {
      check("params.p", [&] { lp::BesovIndex::solution(p.at("p"), 2.0); });
      validate_exponents(p, "q");
      check("params.tol/max_iter", [&] { solver_config(*this).validate(); });
      const std::string sign = p.at("sign");
      require(sign == "pde" || sign == "paper_literal", "params.sign", "expected \"pde\" or \"paper_literal\"");
      require_positive(p, "residual_tolerance");
      require_positive(p, "ratio_threshold");
      const Json& f = p.at("forcing");
      const double lo = f.at("r_min"), hi = f.at("r_max");
      require(lo >= 0.0 && hi > lo, "params.forcing.r_min/r_max", "band must satisfy 0 <= r_min < r_max");
      require(lo < lat.nyquist() && hi >= lat.spacing(), "params.forcing.r_min/r_max",
              "band holds no lattice frequency");
      if (f.at("data_norm").is_null()) {
        require(f.at("delta0_fraction").get<double>() > 0.0, "params.forcing.delta0_fraction", "must be positive");
        require(f.at("samples").get<int>() >= 50, "params.forcing.samples",
                "estimate_constants needs at least 50 samples");
        check("config.lattice", [&] { solver::sampling_shells(lat); });
      } else {
        require(f.at("data_norm").get<double>() > 0.0, "params.forcing.data_norm", "must be positive");
      }
      break;
    }
    case Experiment::illpose_step1: {
      require_positive(p, "delta");
      check("params.p", [&] { lp::BesovIndex::solution(p.at("p"), 2.0); });
      validate_exponents(p, "q");
      check("params.tol/max_iter", [&] { solver_config(*this).validate(); });
      const auto Ns = p.at("N").get<std::vector<int>>();
      for (std::size_t i = 0; i < Ns.size(); ++i)
        check("params.N[" + std::to_string(i) + "]", [&] { force_spec(*this, Ns[i]).validate(lat); });
      const lp::DyadicPartition part = lp::build_partition(lat);
      const int lo = p.at("j_low").is_null() ? part.j_min() : p.at("j_low").get<int>();
      const int hi = p.at("j_high");
      require(lo <= hi && lo >= part.j_min() && hi <= -1, "params.j_low/j_high",
              "low-frequency window must lie in [" + std::to_string(part.j_min()) + ", -1]");
      require_fraction(p, "data_ratio_tolerance");
      require_fraction(p, "lowfreq_variation");
      require_positive(p, "perturbation_fraction");
      require_positive(p, "residual_tolerance");
      break;
    }
    case Experiment::illpose_step2: {
      require_positive(p, "delta");
      require(p.at("terms").size() == 2, "params.terms", "expected [first, last]");
      check("params.p", [&] { lp::BesovIndex::data(p.at("p"), 2.0); });
      validate_exponents(p, "q");
      check("params", [&] { force_spec(*this, p.at("N")).validate(lat); });
      const double radius = p.at("probe_radius");
      require(radius > 0.0 && radius <= 1.0, "params.probe_radius", "probes must satisfy |xi| <= 1");
      check("params.probe_radius", [&] {
        if (illposed::quadrant_probes(lat, radius).empty())
          throw EmptySupport("no lattice wavenumber with k1 k2 != 0 inside the radius");
      });
      const lp::DyadicPartition part = lp::build_partition(lat);
      const int lo = p.at("j_low").is_null() ? part.j_min() : p.at("j_low").get<int>();
      const int hi = p.at("j_high");
      require(lo <= hi && lo >= part.j_min() && hi <= -1, "params.j_low/j_high",
              "low-frequency window must lie in [" + std::to_string(part.j_min()) + ", -1]");
      require_positive(p, "split_tolerance");
      break;
    }
    case Experiment::illpose_step3: {
      require_positive(p, "delta");
      require(p.at("blocks").size() == 2, "params.blocks", "expected [first, last]");
      check("params.p", [&] { lp::BesovIndex::data(p.at("p"), 2.0); });
      validate_exponents(p, "q");
      validate_exponents(p, "qs");
      check("params", [&] { force_spec(*this, p.at("N")).validate(lat); });
      require_fraction(p, "inflation_tolerance");
      break;
    }
  }
}

solver::SolveConfig solver_config(const ExperimentConfig& c) {
  const Json& p = c.params;
  solver::SolveConfig s;
  s.index = lp::BesovIndex::solution(p.at("p"), exponent_value(p.at("q")));
  s.tol = p.at("tol");
  s.max_iter = p.at("max_iter");
  if (p.contains("sign") && p.at("sign") == "paper_literal") s.sign = solver::NonlinearSign::paper_literal;
  return s;
}

Json ExperimentConfig::to_json() const {
  Json j = Json::object();
  j["experiment"] = to_string(experiment);
  j["lattice"] = {{"M", lattice_size}, {"h", lattice_spacing}};
  j["seed"] = seed;
  j["output"] = output.string();
  j["threads"] = threads;
  j["params"] = params;
  return j;
}

}  // namespace sqg::cli
