#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasor/fixtures.hpp"
#include "phasor/harmonic_operators.hpp"
#include "phasor/harmonic_solvers.hpp"
#include "phasor/json_io.hpp"
#include "phasor/lmi.hpp"
#include "phasor/simulation.hpp"
#include "phasor/spectral.hpp"

namespace py = pybind11;
using namespace phasor;

namespace {

using CoeffArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

// Coefficients as an array of shape (2h+1, rows, cols), slice k at index k + h.
CoeffArray coefficientsOf(const PhasorArray& a) {
  CoeffArray out({static_cast<py::ssize_t>(a.sliceCount()), static_cast<py::ssize_t>(a.rows()),
                  static_cast<py::ssize_t>(a.cols())});
  auto view = out.mutable_unchecked<3>();
  for (int k = -a.order(); k <= a.order(); ++k) {
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) view(k + a.order(), i, j) = a.coeff(i, j, k);
    }
  }
  return out;
}

PhasorArray fromCoefficients(const CoeffArray& coeffs, bool real) {
  if (coeffs.ndim() != 3 || coeffs.shape(0) % 2 != 1) {
    throw ValidationError("coefficients must have shape (2h+1, rows, cols)");
  }
  const auto view = coeffs.unchecked<3>();
  const int h = static_cast<int>(coeffs.shape(0) / 2);
  const Index rows = coeffs.shape(1), cols = coeffs.shape(2);
  std::vector<Complex> flat;
  flat.reserve(static_cast<std::size_t>(coeffs.size()));
  for (py::ssize_t s = 0; s < coeffs.shape(0); ++s) {
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) flat.push_back(view(s, i, j));
    }
  }
  return PhasorArray(rows, cols, h, std::move(flat), real);
}

py::dict reportDict(const SolveReport& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["residual_norm"] = r.residualNorm;
  d["history"] = r.history;
  d["final_h"] = r.finalH;
  d["output_order"] = r.outputOrder;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(phasor, m) {
  m.doc() = "Harmonic-domain modeling, analysis and control of periodic systems";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::enum_<NeglectMode>(m, "NeglectMode")
      .value("absolute", NeglectMode::absolute)
      .value("relative", NeglectMode::relative);

  py::class_<PhasorArray>(m, "PhasorArray")
      .def(py::init(&fromCoefficients), py::arg("coeffs"), py::arg("real") = false,
           "From coefficients of shape (2h+1, rows, cols), slice k at index k + h.")
      .def_static("constant", py::overload_cast<const Matrix&>(&PhasorArray::constant))
      .def_static("zeros", &PhasorArray::zeros, py::arg("rows"), py::arg("cols"), py::arg("h") = 0)
      .def_static("eye", &PhasorArray::eye)
      .def_static("sin", &PhasorArray::sin)
      .def_static("cos", &PhasorArray::cos)
      .def_static(
          "from_function",
          [](const std::function<Matrix(double)>& f, double period, int gridExponent) {
            return PhasorArray::fromFunction(f, period, gridExponent);
          },
          py::arg("f"), py::arg("period"), py::arg("grid_exponent") = 6)
      .def_static(
          "random",
          [](Index rows, Index cols, int h, std::uint64_t seed, double decay) {
            std::mt19937_64 rng(seed);
            return PhasorArray::random(rows, cols, h, rng, decay);
          },
          py::arg("rows"), py::arg("cols"), py::arg("h"), py::arg("seed") = 0, py::arg("decay") = 0.5)
      .def_static("from_json", &deserialize)
      .def("to_json", &serialize)
      .def_property_readonly("rows", &PhasorArray::rows)
      .def_property_readonly("cols", &PhasorArray::cols)
      .def_property_readonly("order", &PhasorArray::order)
      .def_property_readonly("is_real", &PhasorArray::isReal)
      .def("coefficients", &coefficientsOf)
      .def("slice", [](const PhasorArray& a, int k) { return a.sliceOrZero(k); })
      .def("eval_time", py::overload_cast<double, double>(&PhasorArray::evalTime, py::const_),
           py::arg("period"), py::arg("t"))
      .def("hermitian", &PhasorArray::hermitian)
      .def("transpose", &PhasorArray::transpose)
      .def("derivative", &PhasorArray::derivative)
      .def("trunc", &PhasorArray::trunc)
      .def("neglect", &PhasorArray::neglect, py::arg("threshold"),
           py::arg("mode") = NeglectMode::absolute)
      .def("max_magnitude", &PhasorArray::maxMagnitude)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(-py::self)
      .def("__mul__", [](const PhasorArray& a, Complex s) { return s * a; })
      .def("__rmul__", [](const PhasorArray& a, Complex s) { return s * a; })
      .def("__repr__", [](const PhasorArray& a) {
        return "<PhasorArray " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
               " h=" + std::to_string(a.order()) + (a.isReal() ? " real>" : ">");
      });

  m.def("inverse", [](const PhasorArray& a) { return inverse(a); });
  m.def("max_difference", &maxDifference);

  m.def("toeplitz_block", [](const PhasorArray& a, int h) { return toeplitzBlock(a, h).data; },
        py::arg("a"), py::arg("h"));
  m.def("n_operator", [](Index n, int h, double period) { return nOperator(n, h, period).data; },
        py::arg("n"), py::arg("h"), py::arg("period"));
  m.def("harmonic_state_matrix", &harmonicStateMatrix, py::arg("a"), py::arg("h"), py::arg("period"));

  m.def(
      "floquet_exponents",
      [](const PhasorArray& a, int h, double period, bool all) {
        const auto r = floquetExponents(a, h, period, all ? FloquetMode::all : FloquetMode::fundamental);
        py::dict d;
        d["fundamental"] = r.fundamental;
        d["concentration"] = r.concentration;
        d["all"] = r.allEigen;
        d["h"] = r.h;
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("a"), py::arg("h"), py::arg("period"), py::arg("all") = false);
  m.def(
      "is_stable",
      [](const PhasorArray& a, int h, double period) { return isStable(a, h, period).stable; },
      py::arg("a"), py::arg("h"), py::arg("period"));

  m.def(
      "solve_lyapunov",
      [](const PhasorArray& a, const PhasorArray& q, double period, double tol, int hOut, int hMax) {
        LyapunovOptions opt;
        opt.tol = tol;
        opt.hOut = hOut;
        opt.hMax = hMax;
        auto sol = solveLyapunov(a, q, period, opt);
        return py::make_tuple(sol.P, reportDict(sol.report));
      },
      py::arg("a"), py::arg("q"), py::arg("period"), py::arg("tol") = 1e-8, py::arg("h_out") = -1,
      py::arg("h_max") = 400);
  m.def(
      "solve_sylvester",
      [](const PhasorArray& a, const PhasorArray& b, const PhasorArray& c, double period, double tol) {
        LyapunovOptions opt;
        opt.tol = tol;
        auto sol = solveSylvester(a, b, c, period, opt);
        return py::make_tuple(sol.X, reportDict(sol.report));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("period"), py::arg("tol") = 1e-8);
  m.def(
      "riccati_kleinman",
      [](const PhasorArray& a, const PhasorArray& b, const PhasorArray& q, const PhasorArray& r,
         const PhasorArray& k0, double period, int hTrunc, double threshold, int maxIter,
         bool autoUpdateH) {
        RiccatiOptions opt;
        opt.hTrunc = hTrunc;
        opt.residualThreshold = threshold;
        opt.maxIter = maxIter;
        opt.autoUpdateH = autoUpdateH;
        const auto sol = riccatiKleinman(a, b, q, r, k0, period, opt);
        py::dict d = reportDict(sol.report);
        d["K"] = sol.K;
        d["S"] = sol.S;
        d["dc_trace"] = sol.dcTrace;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("q"), py::arg("r"), py::arg("k0"), py::arg("period"),
      py::arg("h_trunc") = 6, py::arg("residual_threshold") = 1e-6, py::arg("max_iter") = 50,
      py::arg("auto_update_h") = true);
  m.def("riccati_residual", &riccatiResidual);

  py::class_<PeriodicStateSpace>(m, "PeriodicStateSpace")
      .def(py::init([](PhasorArray a, PhasorArray b, double period) { return makeSystem(a, b, period); }),
           py::arg("a"), py::arg("b"), py::arg("period"))
      .def(py::init<PhasorArray, PhasorArray, PhasorArray, PhasorArray, double>(), py::arg("a"),
           py::arg("b"), py::arg("c"), py::arg("d"), py::arg("period"))
      .def_property_readonly("a", &PeriodicStateSpace::a)
      .def_property_readonly("b", &PeriodicStateSpace::b)
      .def_property_readonly("period", &PeriodicStateSpace::period)
      .def("feedback", [](const PeriodicStateSpace& s, const PhasorArray& k) { return feedback(s, k); });

  m.def(
      "simulate_initial",
      [](const PeriodicStateSpace& sys, const Vector& x0, const std::vector<double>& times,
         double maxStep) {
        SimulationOptions opt;
        opt.maxStep = maxStep;
        const auto traj = simulateInitial(sys, x0, times, opt);
        return py::make_tuple(traj.states, traj.outputs);
      },
      py::arg("sys"), py::arg("x0"), py::arg("times"), py::arg("max_step") = 0.0);
  m.def(
      "simulate_forced",
      [](const PeriodicStateSpace& sys, const std::vector<double>& times, const PhasorArray& u,
         const Vector& x0, double maxStep) {
        SimulationOptions opt;
        opt.maxStep = maxStep;
        const auto traj = simulateForced(sys, times, u, x0, opt);
        return py::make_tuple(traj.states, traj.outputs);
      },
      py::arg("sys"), py::arg("times"), py::arg("u"), py::arg("x0"), py::arg("max_step") = 0.0);
  m.def(
      "simulate_harmonic",
      [](const PeriodicStateSpace& sys, const Vector& x0, int h, const std::vector<double>& times) {
        const auto traj = simulateHarmonic(sys, initialPhasorColumn(x0, h), h, times);
        return py::make_tuple(traj.phasors, traj.reconstruct(sys.period()));
      },
      py::arg("sys"), py::arg("x0"), py::arg("h"), py::arg("times"));

  py::class_<LmiProblem>(m, "LmiProblem")
      .def_property_readonly("variable_count", [](const LmiProblem& p) { return p.variables().size(); })
      .def_property_readonly("warnings", &LmiProblem::warnings)
      .def("assemble", &LmiProblem::assemble)
      .def("variables_of", &LmiProblem::variablesOf)
      .def("import_solution",
           [](const LmiProblem& p, const std::vector<double>& x) { return p.importSolution(x); })
      .def("check_feasibility",
           [](const LmiProblem& p, const PhasorArray& c) { return checkFeasibility(p, c).minEigenvalues; })
      .def("to_sdpa", [](const LmiProblem& p) { return toSdpa(p); })
      .def("export_sdpa", [](const LmiProblem& p, const std::string& path) { exportSDPA(p, path); });
  m.def("build_lqr_lmi", &buildLqrLmi, py::arg("a"), py::arg("b"), py::arg("q"), py::arg("r"),
        py::arg("period"), py::arg("h_p") = 10, py::arg("h_t") = 10, py::arg("h_lmi") = 20);

  m.def(
      "benchmark_lqr",
      [](double period, int gridExponent) {
        const auto f = fixtures::benchmarkLqr(period, gridExponent);
        py::dict d;
        d["A"] = f.A;
        d["B"] = f.B;
        d["Q"] = f.Q;
        d["R"] = f.R;
        d["K0"] = f.K0;
        d["period"] = f.period;
        return d;
      },
      py::arg("period") = 1.0, py::arg("grid_exponent") = 6);
}
