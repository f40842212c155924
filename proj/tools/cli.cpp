#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "phasor/fixtures.hpp"
#include "phasor/harmonic_operators.hpp"
#include "phasor/harmonic_solvers.hpp"
#include "phasor/json_io.hpp"
#include "phasor/lmi.hpp"
#include "phasor/simulation.hpp"
#include "phasor/spectral.hpp"

namespace phasor::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalFlags {
  std::string outDir = ".";
  std::optional<double> tol;
  std::uint64_t seed = 1;
};

// Everything a command produces is staged here and written only once the
// command has finished, so a rejected input never leaves partial files.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  int status = ok;

  void add(std::string name, std::string body) { files.emplace_back(std::move(name), std::move(body)); }
};

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string dumpJson(const json& doc) { return doc.dump(2) + "\n"; }

// Options documents are flat objects; unknown keys are rejected so typos do
// not silently fall back to defaults.
class OptionsDoc {
 public:
  OptionsDoc(const std::string& path, std::set<std::string> allowed) {
    if (path.empty()) return;
    try {
      doc_ = json::parse(readTextFile(path));
    } catch (const json::exception& e) {
      throw ValidationError("options file " + path + ": " + e.what());
    }
    if (!doc_.is_object()) throw ValidationError("options file " + path + " must hold an object");
    for (const auto& [key, value] : doc_.items()) {
      if (!allowed.count(key)) throw ValidationError("unknown option '" + key + "' in " + path);
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!doc_.contains(key)) return fallback;
    try {
      return doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError("option '" + key + "' has the wrong type");
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key); }
  const json& at(const std::string& key) const { return doc_.at(key); }

 private:
  json doc_ = json::object();
};

double resolvePeriod(std::optional<double> flag, const OptionsDoc& opts) {
  const double period = flag ? *flag : opts.get<double>("period", 1.0);
  if (!(period > 0.0) || !std::isfinite(period)) throw ValidationError("period must be positive");
  return period;
}

void requireNonNegative(int value, const char* what) {
  if (value < 0) throw ValidationError(std::string(what) + " must be non-negative");
}

json reportJson(const SolveReport& r) {
  return {{"converged", r.converged},         {"iterations", r.iterations},
          {"residualNorm", r.residualNorm},   {"history", r.history},
          {"finalH", r.finalH},               {"outputOrder", r.outputOrder},
          {"warnings", r.warnings}};
}

json complexList(const std::vector<Complex>& z) {
  json arr = json::array();
  for (auto v : z) arr.push_back({v.real(), v.imag()});
  return arr;
}

std::string spectrumCsv(const PhasorArray& a) {
  std::ostringstream csv;
  csv << "i,j,k,magnitude\n";
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      for (int k = -a.order(); k <= a.order(); ++k) {
        csv << i + 1 << ',' << j + 1 << ',' << k << ',' << number(std::abs(a.coeff(i, j, k)))
            << '\n';
      }
    }
  }
  return csv.str();
}

std::string timeSeriesCsv(const PhasorArray& a, double period, int samples) {
  std::ostringstream csv;
  csv << 't';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      const std::string name = "a" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      if (a.isReal()) {
        csv << ',' << name;
      } else {
        csv << ',' << name << "_re," << name << "_im";
      }
    }
  }
  csv << '\n';
  for (int s = 0; s < samples; ++s) {
    const double t = period * s / (samples - 1);
    const Matrix v = a.evalTime(period, t);
    csv << number(t);
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) {
        csv << ',' << number(v(i, j).real());
        if (!a.isReal()) csv << ',' << number(v(i, j).imag());
      }
    }
    csv << '\n';
  }
  return csv.str();
}

// Columns: t, x1..xn, y1..yq (real parts).
std::string trajectoryCsv(const std::vector<double>& times, const Matrix& states,
                          const Matrix& outputs) {
  std::ostringstream csv;
  csv << 't';
  for (Index i = 0; i < states.rows(); ++i) csv << ",x" << i + 1;
  for (Index i = 0; i < outputs.rows(); ++i) csv << ",y" << i + 1;
  csv << '\n';
  for (std::size_t s = 0; s < times.size(); ++s) {
    const auto c = static_cast<Index>(s);
    csv << number(times[s]);
    for (Index i = 0; i < states.rows(); ++i) csv << ',' << number(states(i, c).real());
    for (Index i = 0; i < outputs.rows(); ++i) csv << ',' << number(outputs(i, c).real());
    csv << '\n';
  }
  return csv.str();
}

Vector vectorFromJson(const json& doc, Index n, const char* what) {
  if (!doc.is_array() || static_cast<Index>(doc.size()) != n) {
    throw ValidationError(std::string(what) + " must be an array of " + std::to_string(n) + " numbers");
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    if (!doc[static_cast<std::size_t>(i)].is_number()) {
      throw ValidationError(std::string(what) + " must contain numbers");
    }
    v(i) = doc[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

// ---------------------------------------------------------------- commands

struct FixturesArgs {
  double period = 1.0;
  int grid = 6;
};

void cmdFixtures(const FixturesArgs& args, const GlobalFlags& global, Outputs& outs) {
  if (!(args.period > 0.0)) throw ValidationError("period must be positive");
  if (args.grid < 2 || args.grid > 20) throw ValidationError("grid exponent must lie in [2, 20]");
  const auto f = fixtures::benchmarkLqr(args.period, args.grid);
  std::mt19937_64 rng(global.seed);
  outs.add("A.json", serialize(f.A) + "\n");
  outs.add("B.json", serialize(f.B) + "\n");
  outs.add("Q.json", serialize(f.Q) + "\n");
  outs.add("R.json", serialize(f.R) + "\n");
  outs.add("K0.json", serialize(f.K0) + "\n");
  outs.add("sin.json", serialize(PhasorArray::sin()) + "\n");
  outs.add("zeros.json", serialize(PhasorArray::zeros(2, 2)) + "\n");
  outs.add("random.json", serialize(PhasorArray::random(2, 2, 3, rng)) + "\n");
}

struct SpectrumArgs {
  std::string input;
  std::optional<double> period;
  int samples = 200;
  std::optional<double> neglect;
  std::optional<int> trunc;
};

void cmdSpectrum(const SpectrumArgs& args, Outputs& outs) {
  const auto a = readPhasorFile(args.input);
  const double period = resolvePeriod(args.period, OptionsDoc("", {}));
  if (args.samples < 2) throw ValidationError("samples must be at least 2");
  if (args.neglect && !(*args.neglect >= 0.0)) throw ValidationError("neglect threshold must be >= 0");
  if (args.trunc) requireNonNegative(*args.trunc, "trunc");

  outs.add("spectrum.csv", spectrumCsv(a));
  outs.add("timeseries.csv", timeSeriesCsv(a, period, args.samples));
  if (args.neglect) {
    const auto reduced = a.neglect(*args.neglect, NeglectMode::absolute);
    outs.add("spectrum_neglect.csv", spectrumCsv(reduced));
    outs.add("timeseries_neglect.csv", timeSeriesCsv(reduced, period, args.samples));
  }
  if (args.trunc) {
    const auto reduced = a.trunc(*args.trunc);
    outs.add("spectrum_trunc.csv", spectrumCsv(reduced));
    outs.add("timeseries_trunc.csv", timeSeriesCsv(reduced, period, args.samples));
  }
}

struct FloquetArgs {
  std::string input;
  std::optional<double> period;
  int order = 10;
  bool all = false;
};

void cmdFloquet(const FloquetArgs& args, Outputs& outs, std::ostream& out, std::ostream& err) {
  const auto a = readPhasorFile(args.input);
  const double period = resolvePeriod(args.period, OptionsDoc("", {}));
  requireNonNegative(args.order, "order");
  if (a.rows() != a.cols()) throw ValidationError("floquet: A must be square");
  const auto r = floquetExponents(a, args.order, period,
                                  args.all ? FloquetMode::all : FloquetMode::fundamental);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  std::ostringstream csv;
  if (args.all) {
    csv << "re,im\n";
    for (auto z : r.allEigen) csv << number(z.real()) << ',' << number(z.imag()) << '\n';
  } else {
    csv << "re,im,concentration\n";
    for (std::size_t i = 0; i < r.fundamental.size(); ++i) {
      csv << number(r.fundamental[i].real()) << ',' << number(r.fundamental[i].imag()) << ','
          << number(r.concentration[i]) << '\n';
    }
  }
  out << csv.str();
  outs.add("floquet.csv", csv.str());
}

struct LyapArgs {
  std::string a, q, options;
  std::optional<double> period;
};

void cmdLyap(const LyapArgs& args, const GlobalFlags& global, Outputs& outs, std::ostream& out) {
  const OptionsDoc opts(args.options, {"period", "hOut", "hSolve", "hMax", "tol", "maxRefinements",
                                       "growth", "checkStability"});
  const auto a = readPhasorFile(args.a);
  const auto q = readPhasorFile(args.q);
  const double period = resolvePeriod(args.period, opts);
  LyapunovOptions lo;
  lo.hOut = opts.get("hOut", lo.hOut);
  lo.hSolve = opts.get("hSolve", lo.hSolve);
  lo.hMax = opts.get("hMax", lo.hMax);
  lo.tol = global.tol ? *global.tol : opts.get("tol", lo.tol);
  lo.maxRefinements = opts.get("maxRefinements", lo.maxRefinements);
  lo.growth = opts.get("growth", lo.growth);
  lo.checkStability = opts.get("checkStability", lo.checkStability);
  requireNonNegative(lo.hMax, "hMax");
  requireNonNegative(lo.maxRefinements, "maxRefinements");
  if (!(lo.growth > 1.0)) throw ValidationError("growth must exceed 1");
  if (!(lo.tol >= 0.0)) throw ValidationError("tol must be non-negative");

  const auto sol = solveLyapunov(a, q, period, lo);
  outs.add("P.json", serialize(sol.P) + "\n");
  outs.add("lyap_report.json", dumpJson(reportJson(sol.report)));
  out << "residual " << number(sol.report.residualNorm) << " after " << sol.report.iterations
      << " solves, H = " << sol.report.finalH << '\n';
  if (!sol.report.converged) outs.status = notConverged;
}

struct RiccatiArgs {
  std::string a, b, q, r, k0, options;
  std::optional<double> period;
};

void cmdRiccati(const RiccatiArgs& args, const GlobalFlags& global, Outputs& outs,
                std::ostream& out) {
  const OptionsDoc opts(args.options, {"period", "hTrunc", "hMax", "maxIter", "residualThreshold",
                                       "autoUpdateH", "stabilityOrder", "floquetOrder"});
  const auto a = readPhasorFile(args.a);
  const auto b = readPhasorFile(args.b);
  const auto q = readPhasorFile(args.q);
  const auto r = readPhasorFile(args.r);
  const auto k0 = readPhasorFile(args.k0);
  const double period = resolvePeriod(args.period, opts);
  RiccatiOptions ro;
  ro.hTrunc = opts.get("hTrunc", ro.hTrunc);
  ro.hMax = opts.get("hMax", ro.hMax);
  ro.maxIter = opts.get("maxIter", ro.maxIter);
  ro.residualThreshold =
      global.tol ? *global.tol : opts.get("residualThreshold", ro.residualThreshold);
  ro.autoUpdateH = opts.get("autoUpdateH", ro.autoUpdateH);
  ro.stabilityOrder = opts.get("stabilityOrder", ro.stabilityOrder);
  const int floquetOrder = opts.get("floquetOrder", 20);
  requireNonNegative(floquetOrder, "floquetOrder");
  if (!(ro.residualThreshold >= 0.0)) throw ValidationError("residualThreshold must be non-negative");

  const auto sol = riccatiKleinman(a, b, q, r, k0, period, ro);
  const auto closed = floquetExponents(a - b * sol.K, floquetOrder, period);
  json report = reportJson(sol.report);
  report["dcTrace"] = sol.dcTrace;
  report["closedLoopExponents"] = complexList(closed.fundamental);
  report["orderS"] = sol.S.order();
  report["orderK"] = sol.K.order();
  outs.add("S.json", serialize(sol.S) + "\n");
  outs.add("K.json", serialize(sol.K) + "\n");
  outs.add("riccati_report.json", dumpJson(report));
  out << "Riccati residual norm " << number(sol.report.residualNorm) << " after "
      << sol.report.iterations << " iterations\n";
  if (!sol.report.converged) outs.status = notConverged;
}

struct SimArgs {
  std::string a, b, gain, config;
  std::optional<double> period;
};

void cmdSim(const SimArgs& args, Outputs& outs, std::ostream& out) {
  const OptionsDoc opts(args.config, {"period", "horizon", "samples", "step", "x0", "response",
                                      "harmonicOrder"});
  const auto a = readPhasorFile(args.a);
  const auto b = readPhasorFile(args.b);
  const double period = resolvePeriod(args.period, opts);
  auto sys = makeSystem(a, b, period);
  if (!args.gain.empty()) sys = feedback(sys, readPhasorFile(args.gain));

  const double horizon = opts.get("horizon", 5.0 * period);
  const int samples = opts.get("samples", 501);
  SimulationOptions so;
  so.maxStep = opts.get("step", 0.0);
  const std::string response = opts.get<std::string>("response", "both");
  const int harmonicOrder = opts.get("harmonicOrder", -1);
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  if (samples < 2) throw ValidationError("samples must be at least 2");
  if (response != "initial" && response != "step" && response != "both") {
    throw ValidationError("response must be initial, step or both");
  }
  const Index n = sys.states();
  const Vector x0 = opts.has("x0") ? vectorFromJson(opts.at("x0"), n, "x0") : Vector::Ones(n);

  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) times[static_cast<std::size_t>(i)] = horizon * i / (samples - 1);

  if (response != "step") {
    const auto traj = simulateInitial(sys, x0, times, so);
    outs.add("initial.csv", trajectoryCsv(times, traj.states, traj.outputs));
    out << "initial response: final state norm " << number(traj.states.col(samples - 1).norm())
        << '\n';
    if (harmonicOrder >= 0) {
      const auto h = simulateHarmonic(sys, initialPhasorColumn(x0, harmonicOrder), harmonicOrder, times);
      const Matrix states = h.reconstruct(period);
      Matrix outputs(sys.outputs(), samples);
      for (int i = 0; i < samples; ++i) {
        outputs.col(i) = sys.c().evalTime(period, times[static_cast<std::size_t>(i)]) * states.col(i);
      }
      outs.add("harmonic.csv", trajectoryCsv(times, states, outputs));
      out << "harmonic model (h = " << harmonicOrder << "): max deviation "
          << number((states - traj.states).cwiseAbs().maxCoeff()) << '\n';
    }
  }
  if (response != "initial") {
    const auto u = PhasorArray::constant(RealMatrix(RealMatrix::Ones(sys.inputs(), 1)));
    const auto traj = simulateForced(sys, times, u, Vector::Zero(n), so);
    outs.add("step.csv", trajectoryCsv(times, traj.states, traj.outputs));
    out << "step response: final state norm " << number(traj.states.col(samples - 1).norm()) << '\n';
  }
}

struct LmiArgs {
  std::string a, b, q, r, options, check;
  std::string name = "lmi";
  std::optional<double> period;
};

void cmdLmiExport(const LmiArgs& args, Outputs& outs, std::ostream& out, std::ostream& err) {
  const OptionsDoc opts(args.options, {"period", "hP", "ht", "hlmi"});
  const auto a = readPhasorFile(args.a);
  const auto b = readPhasorFile(args.b);
  const auto q = readPhasorFile(args.q);
  const auto r = readPhasorFile(args.r);
  const double period = resolvePeriod(args.period, opts);
  if (args.name.empty() || args.name.find('/') != std::string::npos) {
    throw ValidationError("name must be a plain file stem");
  }
  const auto lmi = buildLqrLmi(a, b, q, r, period, opts.get("hP", 10), opts.get("ht", 10),
                               opts.get("hlmi", 20));
  for (const auto& w : lmi.warnings()) err << "warning: " << w << '\n';
  std::optional<PhasorArray> candidate;
  if (!args.check.empty()) candidate = readPhasorFile(args.check);

  std::optional<FeasibilityMargins> margins;
  if (candidate) margins = checkFeasibility(lmi, *candidate);

  const std::string file = args.name + ".dat-s";
  outs.add(file, toSdpa(lmi));
  outs.add(file + ".json", variableMapJson(lmi));
  out << lmi.variables().size() << " variables, blocks";
  for (const auto& blk : lmi.blocks()) out << ' ' << blk.name << '(' << blk.size << ')';
  out << '\n';
  if (margins) {
    outs.add(args.name + "_check.json",
             dumpJson({{"minEigenvalues", margins->minEigenvalues}, {"worst", margins->worst()}}));
    out << "candidate worst block margin " << number(margins->worst()) << '\n';
  }
}

void writeOutputs(const Outputs& outs, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
  for (const auto& [name, body] : outs.files) writeTextFile(dir / name, body);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic-domain analysis and control of periodic systems", "phasor-cli"};
  app.require_subcommand(1);
  GlobalFlags global;
  app.add_option("--out", global.outDir, "output directory")->capture_default_str();
  app.add_option("--tol", global.tol, "residual tolerance for lyap and riccati");
  app.add_option("--seed", global.seed, "seed for generated fixtures")->capture_default_str();

  FixturesArgs fx;
  auto* fixturesCmd = app.add_subcommand("fixtures", "write the benchmark fixtures as JSON");
  fixturesCmd->add_option("--period", fx.period)->capture_default_str();
  fixturesCmd->add_option("--grid", fx.grid, "sampling grid exponent N (2^N points)")
      ->capture_default_str();

  SpectrumArgs sp;
  auto* spectrumCmd = app.add_subcommand("spectrum", "harmonic magnitudes and one period of A(t)");
  spectrumCmd->add_option("input", sp.input)->required();
  spectrumCmd->add_option("--period", sp.period);
  spectrumCmd->add_option("--samples", sp.samples)->capture_default_str();
  spectrumCmd->add_option("--neglect", sp.neglect, "also export with phasors below this dropped");
  spectrumCmd->add_option("--trunc", sp.trunc, "also export truncated to this order");

  FloquetArgs fl;
  auto* floquetCmd = app.add_subcommand("floquet", "Floquet exponents as CSV");
  floquetCmd->add_option("input", fl.input)->required();
  floquetCmd->add_option("--period", fl.period);
  floquetCmd->add_option("-H,--order", fl.order, "truncation order h")->capture_default_str();
  floquetCmd->add_flag("--all", fl.all, "print the whole truncated spectrum");

  LyapArgs ly;
  auto* lyapCmd = app.add_subcommand("lyap", "periodic Lyapunov equation");
  lyapCmd->add_option("A", ly.a)->required();
  lyapCmd->add_option("Q", ly.q)->required();
  lyapCmd->add_option("--options", ly.options, "options JSON");
  lyapCmd->add_option("--period", ly.period);

  RiccatiArgs ri;
  auto* riccatiCmd = app.add_subcommand("riccati", "periodic Riccati equation (Kleinman)");
  riccatiCmd->add_option("A", ri.a)->required();
  riccatiCmd->add_option("B", ri.b)->required();
  riccatiCmd->add_option("Q", ri.q)->required();
  riccatiCmd->add_option("R", ri.r)->required();
  riccatiCmd->add_option("K0", ri.k0)->required();
  riccatiCmd->add_option("--options", ri.options, "options JSON");
  riccatiCmd->add_option("--period", ri.period);

  SimArgs si;
  auto* simCmd = app.add_subcommand("sim", "initial-condition and step responses");
  simCmd->add_option("A", si.a)->required();
  simCmd->add_option("B", si.b)->required();
  simCmd->add_option("--gain", si.gain, "state feedback K, u = -K x");
  simCmd->add_option("--config", si.config, "simulation config JSON");
  simCmd->add_option("--period", si.period);

  LmiArgs lm;
  auto* lmiCmd = app.add_subcommand("lmi-export", "LQR LMI in SDPA sparse format");
  lmiCmd->add_option("A", lm.a)->required();
  lmiCmd->add_option("B", lm.b)->required();
  lmiCmd->add_option("Q", lm.q)->required();
  lmiCmd->add_option("R", lm.r)->required();
  lmiCmd->add_option("--options", lm.options, "options JSON");
  lmiCmd->add_option("--name", lm.name, "output file stem")->capture_default_str();
  lmiCmd->add_option("--check", lm.check, "candidate P to verify");
  lmiCmd->add_option("--period", lm.period);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid;
  }

  Outputs outs;
  try {
    if (fixturesCmd->parsed()) cmdFixtures(fx, global, outs);
    if (spectrumCmd->parsed()) cmdSpectrum(sp, outs);
    if (floquetCmd->parsed()) cmdFloquet(fl, outs, out, err);
    if (lyapCmd->parsed()) cmdLyap(ly, global, outs, out);
    if (riccatiCmd->parsed()) cmdRiccati(ri, global, outs, out);
    if (simCmd->parsed()) cmdSim(si, outs, out);
    if (lmiCmd->parsed()) cmdLmiExport(lm, outs, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return invalid;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return notConverged;
  }

  try {
    writeOutputs(outs, global.outDir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
  if (outs.status == notConverged) err << "warning: solver did not converge\n";
  return outs.status;
}

}  // namespace phasor::cli
