#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "sqg/bilinear/bilinear.hpp"
#include "sqg/cli/experiment.hpp"
#include "sqg/error.hpp"
#include "sqg/illposed/illposed.hpp"
#include "sqg/lp/besov.hpp"
#include "sqg/lp/partition.hpp"
#include "sqg/random.hpp"
#include "sqg/solver/solver.hpp"
#include "sqg/spectral/operators.hpp"

namespace py = pybind11;
using namespace sqg;

namespace {

using CArray = py::array_t<complex, py::array::c_style | py::array::forcecast>;

// Scalar field from an (M, M) coefficient array in FFT order.
SpectralField from_array(const FrequencyLattice& lat, const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != lat.size() || a.shape(1) != lat.size())
    throw PreconditionError("coefficient array must have shape (M, M)");
  SpectralField f(lat);
  auto c = f.component(0);
  std::copy(a.data(), a.data() + c.size(), c.begin());
  f.clear_nyquist();
  f.set_real_valued(f.hermitian_defect() <= 1e-12 * std::max(1.0, f.max_abs()));
  return f;
}

CArray to_array(const SpectralField& f, int component = 0) {
  const auto m = static_cast<py::ssize_t>(f.lattice().size());
  CArray out({m, m});
  const auto c = f.component(component);
  std::copy(c.begin(), c.end(), out.mutable_data());
  return out;
}

py::object json_to_py(const cli::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

cli::Json py_to_json(const py::object& o) {
  return cli::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict trace_dict(const solver::IterationTrace& t) {
  py::dict d;
  py::list records;
  for (const auto& r : t.records) {
    py::dict rec;
    rec["iteration"] = r.iteration;
    rec["norm"] = r.norm;
    rec["residual"] = r.residual;
    rec["ratio"] = r.ratio;
    rec["pde_residual"] = r.pde_residual;
    records.append(rec);
  }
  d["records"] = records;
  d["verdict"] = solver::to_string(t.verdict);
  d["message"] = t.message;
  d["data_norm"] = t.data_norm;
  d["fixed_point_residual"] = t.fixed_point_residual;
  d["pde_residual"] = t.pde_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stationary quasi-geostrophic equation in critical Besov spaces";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_MemoryError);

  py::class_<FrequencyLattice>(m, "FrequencyLattice")
      .def(py::init<int, double>(), py::arg("M"), py::arg("h"))
      .def_property_readonly("M", &FrequencyLattice::size)
      .def_property_readonly("h", &FrequencyLattice::spacing)
      .def_property_readonly("nyquist", &FrequencyLattice::nyquist)
      .def_property_readonly("box_side", &FrequencyLattice::box_side)
      .def("__repr__", [](const FrequencyLattice& l) {
        return "FrequencyLattice(M=" + std::to_string(l.size()) + ", h=" + cli::format_number(l.spacing()) + ")";
      });

  py::class_<SpectralField>(m, "SpectralField")
      .def(py::init([](const FrequencyLattice& lat, const CArray& a) { return from_array(lat, a); }),
           py::arg("lattice"), py::arg("coefficients"))
      .def(py::init<const FrequencyLattice&>(), py::arg("lattice"))
      .def_property_readonly("lattice", &SpectralField::lattice)
      .def_property_readonly("real_valued", &SpectralField::real_valued)
      .def("coefficients", &to_array, py::arg("component") = 0)
      .def("at", [](const SpectralField& f, int k1, int k2) { return f.at(k1, k2); })
      .def("coefficient_norm", &SpectralField::coefficient_norm)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(double() * py::self)
      .def(py::self * double());

  m.def("relative_distance", &relative_distance);
  m.def(
      "random_field",
      [](const FrequencyLattice& lat, double r_min, double r_max, std::uint64_t seed, double slope) {
        std::mt19937_64 rng(seed);
        return random_field(lat, r_min, r_max, rng, slope);
      },
      py::arg("lattice"), py::arg("r_min"), py::arg("r_max"), py::arg("seed") = 1, py::arg("slope") = 0.0);

  m.def("inverse_laplacian", &spectral::inverse_laplacian);
  m.def("bee", &bilinear::bee);
  m.def("bee_block", &bilinear::bee_block);
  m.def("bee_diag_fast", &bilinear::bee_diag_fast);
  m.def("bee_coefficient", &bilinear::bee_coefficient);

  m.def(
      "besov_norm",
      [](const SpectralField& f, double s, double p, double q, int oversample) {
        lp::NormOptions o;
        o.oversample = oversample;
        return lp::besov_norm(f, lp::BesovIndex(s, p, q), o);
      },
      py::arg("field"), py::arg("s"), py::arg("p"), py::arg("q"), py::arg("oversample") = 1);
  m.def("solution_index", [](double p) { return 2.0 / p - 1.0; });
  m.def("data_index", [](double p) { return 2.0 / p - 3.0; });
  m.def(
      "shell_profile",
      [](const SpectralField& f, double s, double p) {
        std::vector<std::pair<int, double>> out;
        for (const auto& e : lp::shell_profile(f, s, p).entries) out.emplace_back(e.j, e.value);
        return out;
      },
      py::arg("field"), py::arg("s"), py::arg("p"));

  m.def(
      "picard_solve",
      [](const SpectralField& f, double p, double q, double tol, int max_iter, const std::string& sign) {
        solver::SolveConfig c;
        c.index = lp::BesovIndex::solution(p, q);
        c.tol = tol;
        c.max_iter = max_iter;
        if (sign == "paper_literal") c.sign = solver::NonlinearSign::paper_literal;
        else if (sign != "pde") throw PreconditionError("sign must be 'pde' or 'paper_literal'");
        const auto r = solver::picard_solve(f, c);
        return py::make_tuple(r.theta, trace_dict(r.trace));
      },
      py::arg("forcing"), py::arg("p") = 4.0, py::arg("q") = 2.0, py::arg("tol") = 1e-10,
      py::arg("max_iter") = 64, py::arg("sign") = "pde");
  m.def(
      "estimate_constants",
      [](const FrequencyLattice& lat, int samples, double p, double q, std::uint64_t seed) {
        solver::ConstantsOptions o;
        o.p = p;
        o.q = q;
        o.seed = seed;
        return json_to_py(cli::Json::parse(solver::estimate_constants(lat, samples, o).to_json()));
      },
      py::arg("lattice"), py::arg("samples") = 60, py::arg("p") = 4.0, py::arg("q") = 2.0, py::arg("seed") = 1);

  m.def("force_step1", &illposed::force_step1, py::arg("lattice"), py::arg("N"), py::arg("delta") = 0.01);
  m.def(
      "second_iterate",
      [](const SpectralField& f) {
        auto it = illposed::second_iterate(f);
        return py::make_tuple(it.theta1, it.theta2);
      },
      py::arg("forcing"));
  m.def("lowfreq_lower_bound",
        py::overload_cast<const SpectralField&, int, int>(&illposed::lowfreq_lower_bound), py::arg("theta"),
        py::arg("j_low"), py::arg("j_high"));
  m.def(
      "iterate2_split",
      [](const SpectralField& theta1, int k1, int k2) {
        const auto s = illposed::iterate2_split(theta1, k1, k2);
        py::dict d;
        d["main"] = s.main;
        d["cross"] = s.cross;
        d["perp"] = s.perp;
        d["total"] = s.total();
        return d;
      },
      py::arg("theta1"), py::arg("k1"), py::arg("k2"));

  m.def(
      "run_experiment",
      [](const py::dict& config, bool emit) {
        const auto c = cli::ExperimentConfig::from_json(py_to_json(config));
        cli::ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = cli::run_experiment(c);
        }
        if (emit) {
          cli::emit_report(rep, cli::Format::csv);
          cli::emit_report(rep, cli::Format::json);
        }
        py::dict d = json_to_py(rep.to_json()).cast<py::dict>();
        d["wall_seconds"] = rep.wall_seconds;
        return d;
      },
      py::arg("config"), py::arg("emit") = false);
  m.def("experiments", &cli::experiment_names);
}
