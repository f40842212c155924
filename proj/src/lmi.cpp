#include "phasor/lmi.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "phasor/harmonic_operators.hpp"
#include "phasor/json_io.hpp"

namespace phasor {
namespace {

constexpr double kHermitianTolerance = 1e-9;

bool nearlyHermitian(const PhasorArray& x) {
  return x.rows() == x.cols() &&
         maxDifference(x, x.hermitian()) <= kHermitianTolerance * (1.0 + x.maxMagnitude());
}

Matrix snapHermitian(const Matrix& m) { return (0.5 * (m + m.adjoint())).eval(); }

double minEigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("LMI block eigensolver failed");
  return eig.eigenvalues()(0);
}

SparseMatrix toSparse(const Matrix& m) {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != Complex(0.0, 0.0)) entries.emplace_back(r, c, m(r, c));
    }
  }
  SparseMatrix out(m.rows(), m.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

std::string formatNumber(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

const char* toString(LmiVariable::Part part) {
  switch (part) {
    case LmiVariable::Part::dc: return "dc";
    case LmiVariable::Part::real: return "real";
    case LmiVariable::Part::imag: return "imag";
  }
  return "dc";
}

LmiProblem::LmiProblem(PhasorArray a, PhasorArray b, PhasorArray q, PhasorArray r, double period,
                       int hP, int ht, int hlmi)
    : period_(period), hP_(hP), ht_(ht), hlmi_(hlmi) {
  const Index n = a.rows();
  const Index p = b.cols();
  if (a.cols() != n) throw ValidationError("buildLqrLmi: A must be square");
  if (b.rows() != n) throw ValidationError("buildLqrLmi: B must have n rows");
  if (q.rows() != n || q.cols() != n) throw ValidationError("buildLqrLmi: Q must be n x n");
  if (r.rows() != p || r.cols() != p) throw ValidationError("buildLqrLmi: R must be p x p");
  if (hP < 0 || ht < 0 || hlmi < 0) throw ValidationError("buildLqrLmi: orders must be non-negative");
  if (!(period > 0.0)) throw ValidationError("buildLqrLmi: period must be positive");
  if (!nearlyHermitian(q)) throw ValidationError("buildLqrLmi: Q must be hermitian-valued");
  if (!nearlyHermitian(r)) throw ValidationError("buildLqrLmi: R must be hermitian-valued");
  if (hlmi < hP + ht) {
    warnings_.push_back("hlmi < hP + ht: lifted products are truncated inside the LMI window");
  }
  a_ = a.trunc(ht);
  b_ = std::move(b);
  q_ = hermitianPart(q);
  r_ = hermitianPart(r);

  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) vars_.push_back({LmiVariable::Part::dc, 0, i, j});
  }
  for (int k = 1; k <= hP; ++k) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        vars_.push_back({LmiVariable::Part::real, k, i, j});
        vars_.push_back({LmiVariable::Part::imag, k, i, j});
      }
    }
  }
  objective_.assign(vars_.size(), 0.0);
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    if (vars_[v].part == LmiVariable::Part::dc && vars_[v].i == vars_[v].j) objective_[v] = 1.0;
  }
}

std::vector<LmiBlockInfo> LmiProblem::blocks() const {
  const Index b = 2 * hlmi_ + 1;
  return {{"positivity", b * states()}, {"lqr", b * (states() + inputs())}};
}

void LmiProblem::checkBlock(int block) const {
  if (block != 0 && block != 1) throw ValidationError("LmiProblem: block index must be 0 or 1");
}

PhasorArray LmiProblem::basis(std::size_t v) const {
  if (v >= vars_.size()) throw ValidationError("LmiProblem: variable index out of range");
  std::vector<double> x(vars_.size(), 0.0);
  x[v] = 1.0;
  return importSolution(x);
}

PhasorArray LmiProblem::importSolution(std::span<const double> x) const {
  if (x.size() != vars_.size()) throw ValidationError("importSolution: wrong number of variables");
  const Index n = states();
  const Index sliceSize = n * n;
  std::vector<Complex> coeffs(static_cast<std::size_t>((2 * hP_ + 1) * sliceSize));
  auto at = [&](int k, Index i, Index j) -> Complex& {
    return coeffs[static_cast<std::size_t>((k + hP_) * sliceSize + j * n + i)];
  };
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    const auto& var = vars_[v];
    switch (var.part) {
      case LmiVariable::Part::dc:
        at(0, var.i, var.j) += x[v];
        if (var.i != var.j) at(0, var.j, var.i) += x[v];
        break;
      case LmiVariable::Part::real:
        at(var.k, var.i, var.j) += x[v];
        at(-var.k, var.j, var.i) += x[v];
        break;
      case LmiVariable::Part::imag:
        at(var.k, var.i, var.j) += Complex(0.0, x[v]);
        at(-var.k, var.j, var.i) += Complex(0.0, -x[v]);
        break;
    }
  }
  return PhasorArray(n, n, hP_, std::move(coeffs));
}

std::vector<double> LmiProblem::variablesOf(const PhasorArray& p) const {
  if (p.rows() != states() || p.cols() != states()) {
    throw ValidationError("LmiProblem: decision matrix must be n x n");
  }
  if (p.order() > hP_) throw ValidationError("LmiProblem: decision matrix order exceeds hP");
  std::vector<double> x(vars_.size());
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    const auto& var = vars_[v];
    switch (var.part) {
      case LmiVariable::Part::dc:
        x[v] = 0.5 * (p.coeff(var.i, var.j, 0).real() + p.coeff(var.j, var.i, 0).real());
        break;
      case LmiVariable::Part::real:
        x[v] = var.k <= p.order() ? p.coeff(var.i, var.j, var.k).real() : 0.0;
        break;
      case LmiVariable::Part::imag:
        x[v] = var.k <= p.order() ? p.coeff(var.i, var.j, var.k).imag() : 0.0;
        break;
    }
  }
  return x;
}

Matrix LmiProblem::constantTerm(int block) const {
  checkBlock(block);
  const auto info = blocks()[static_cast<std::size_t>(block)];
  Matrix f = Matrix::Zero(info.size, info.size);
  if (block == 1) {
    const Index top = (2 * hlmi_ + 1) * states();
    f.topLeftCorner(top, top) = toeplitzBlock(q_, hlmi_).data;
    f.bottomRightCorner(info.size - top, info.size - top) = toeplitzBlock(r_, hlmi_).data;
  }
  return snapHermitian(f);
}

Matrix LmiProblem::assemble(int block, const PhasorArray& p) const {
  checkBlock(block);
  if (p.rows() != states() || p.cols() != states()) {
    throw ValidationError("LmiProblem: decision matrix must be n x n");
  }
  if (block == 0) return snapHermitian(toeplitzBlock(p, hlmi_).data);
  const PhasorArray top = a_.hermitian() * p + p * a_ + p.derivative(period_) + q_;
  const Matrix cross = toeplitzBlock(p * b_, hlmi_).data;
  const Index rowsTop = cross.rows();
  const Index size = rowsTop + cross.cols();
  Matrix f(size, size);
  f.topLeftCorner(rowsTop, rowsTop) = toeplitzBlock(top, hlmi_).data;
  f.topRightCorner(rowsTop, cross.cols()) = cross;
  f.bottomLeftCorner(cross.cols(), rowsTop) = cross.adjoint();
  f.bottomRightCorner(cross.cols(), cross.cols()) = toeplitzBlock(r_, hlmi_).data;
  return snapHermitian(f);
}

SparseMatrix LmiProblem::coefficient(int block, std::size_t v) const {
  checkBlock(block);
  const PhasorArray e = basis(v);
  if (block == 0) return toSparse(snapHermitian(toeplitzBlock(e, hlmi_).data));
  const PhasorArray top = a_.hermitian() * e + e * a_ + e.derivative(period_);
  const Matrix cross = toeplitzBlock(e * b_, hlmi_).data;
  const Index rowsTop = cross.rows();
  const Index size = rowsTop + cross.cols();
  Matrix f = Matrix::Zero(size, size);
  f.topLeftCorner(rowsTop, rowsTop) = toeplitzBlock(top, hlmi_).data;
  f.topRightCorner(rowsTop, cross.cols()) = cross;
  f.bottomLeftCorner(cross.cols(), rowsTop) = cross.adjoint();
  return toSparse(snapHermitian(f));
}

LmiProblem buildLqrLmi(const PhasorArray& a, const PhasorArray& b, const PhasorArray& q,
                       const PhasorArray& r, double period, int hP, int ht, int hlmi) {
  return LmiProblem(a, b, q, r, period, hP, ht, hlmi);
}

double FeasibilityMargins::worst() const {
  return minEigenvalues.empty() ? 0.0
                                : *std::min_element(minEigenvalues.begin(), minEigenvalues.end());
}

FeasibilityMargins checkFeasibility(const LmiProblem& problem, const PhasorArray& candidate) {
  if (candidate.order() > problem.orderP()) {
    throw ValidationError("checkFeasibility: candidate order exceeds hP");
  }
  if (!nearlyHermitian(candidate)) {
    throw ValidationError("checkFeasibility: candidate must be hermitian-valued");
  }
  FeasibilityMargins out;
  for (int block = 0; block < 2; ++block) {
    out.minEigenvalues.push_back(minEigenvalue(problem.assemble(block, candidate)));
  }
  return out;
}

FeasibilityMargins evaluateMargins(const LmiProblem& problem, std::span<const double> x) {
  if (x.size() != problem.variables().size()) {
    throw ValidationError("evaluateMargins: wrong number of variables");
  }
  FeasibilityMargins out;
  for (int block = 0; block < 2; ++block) {
    Matrix f = problem.constantTerm(block);
    for (std::size_t v = 0; v < x.size(); ++v) {
      if (x[v] != 0.0) f += x[v] * Matrix(problem.coefficient(block, v));
    }
    out.minEigenvalues.push_back(minEigenvalue(f));
  }
  return out;
}

std::string toSdpa(const LmiProblem& problem) {
  const auto& vars = problem.variables();
  if (vars.empty()) throw ValidationError("exportSDPA: problem has no decision variables");
  const auto blocks = problem.blocks();

  std::ostringstream out;
  out << "\"LQR Toeplitz-block LMI, n=" << problem.states() << " p=" << problem.inputs()
      << " hP=" << problem.orderP() << " ht=" << problem.orderA()
      << " hlmi=" << problem.orderLmi() << "\"\n";
  out << vars.size() << "\n" << blocks.size() << "\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) out << (b ? " " : "") << 2 * blocks[b].size;
  out << "\n";
  for (std::size_t v = 0; v < vars.size(); ++v) {
    // SDPA minimizes c.x; the problem maximizes objective.x.
    const double c = problem.objective()[v];
    out << (v ? " " : "") << formatNumber(c == 0.0 ? 0.0 : -c);
  }
  out << "\n";

  using Entry = std::tuple<Index, Index, double>;
  auto emit = [&](std::size_t matno, int block, const SparseMatrix& f) {
    const Index s = f.rows();
    std::vector<Entry> entries;
    for (Index c = 0; c < f.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(f, c); it; ++it) {
        const Index r = it.row();
        const double re = it.value().real();
        const double im = it.value().imag();
        if (re != 0.0 && r <= c) {
          entries.emplace_back(r, c, re);
          entries.emplace_back(r + s, c + s, re);
        }
        if (im != 0.0) entries.emplace_back(r, c + s, -im);
      }
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [r, c, value] : entries) {
      out << matno << " " << block + 1 << " " << r + 1 << " " << c + 1 << " "
          << formatNumber(value) << "\n";
    }
  };
  // SDPA: sum x_v F_v - F_0 >= 0, so its F_0 is minus the constant term.
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    emit(0, b, toSparse(-problem.constantTerm(b)));
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
      emit(v + 1, b, problem.coefficient(b, v));
    }
  }
  return out.str();
}

std::string variableMapJson(const LmiProblem& problem) {
  nlohmann::json doc;
  doc["format"] = "sdpa-sparse";
  doc["sense"] = "maximize";
  doc["sdpaObjectiveSign"] = -1;
  doc["realification"] = "[[Re, -Im], [Im, Re]]";
  doc["states"] = problem.states();
  doc["inputs"] = problem.inputs();
  doc["hP"] = problem.orderP();
  doc["ht"] = problem.orderA();
  doc["hlmi"] = problem.orderLmi();
  doc["period"] = problem.period();
  doc["blocks"] = nlohmann::json::array();
  for (const auto& b : problem.blocks()) {
    doc["blocks"].push_back({{"name", b.name}, {"complexSize", b.size}, {"realSize", 2 * b.size}});
  }
  doc["variables"] = nlohmann::json::array();
  const auto& vars = problem.variables();
  for (std::size_t v = 0; v < vars.size(); ++v) {
    doc["variables"].push_back({{"index", v + 1},
                                {"part", toString(vars[v].part)},
                                {"k", vars[v].k},
                                {"i", vars[v].i},
                                {"j", vars[v].j}});
  }
  doc["warnings"] = problem.warnings();
  return doc.dump(2) + "\n";
}

void exportSDPA(const LmiProblem& problem, const std::filesystem::path& path) {
  const std::string body = toSdpa(problem);
  const std::string map = variableMapJson(problem);
  writeTextFile(path, body);
  writeTextFile(std::filesystem::path(path.string() + ".json"), map);
}

}  // namespace phasor
