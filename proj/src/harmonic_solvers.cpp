#include "phasor/harmonic_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phasor/dense_solvers.hpp"
#include "phasor/harmonic_operators.hpp"
#include "phasor/spectral.hpp"

namespace phasor {
namespace {

constexpr double kHermitianTolerance = 1e-9;
constexpr double kTailEnergyLimit = 1e-8;

void requireHermitian(const PhasorArray& x, const char* what) {
  if (x.rows() != x.cols()) {
    throw ValidationError(std::string(what) + " must be square");
  }
  if (maxDifference(x, x.hermitian()) > kHermitianTolerance * (1.0 + x.maxMagnitude())) {
    throw ValidationError(std::string(what) + " must be hermitian-valued");
  }
}

int grow(int h, double factor) {
  return std::max(h + 1, static_cast<int>(std::ceil(factor * h)));
}

int stabilityCheckOrder(const PhasorArray& a) {
  return std::clamp(2 * a.effectiveOrder(), 10, 40);
}

void requireStable(const PhasorArray& a, double period, int h, const char* what) {
  const auto verdict = isStable(a, h, period);
  if (!verdict.stable) {
    std::ostringstream msg;
    msg << what << " (worst Floquet exponent " << verdict.worst.real()
        << (verdict.worst.imag() < 0 ? " - " : " + ") << std::abs(verdict.worst.imag()) << "j)";
    throw ValidationError(msg.str());
  }
}

// Shared inflate-solve-extract-verify loop. `solveAt(H, hOut)` returns the
// extracted candidate; `residualOf` certifies it.
template <typename SolveAt, typename ResidualOf>
std::pair<PhasorArray, SolveReport> refine(int hStart, int margin, const LyapunovOptions& opt,
                                           SolveAt&& solveAt, ResidualOf&& residualOf) {
  if (opt.hMax < 0) throw ValidationError("hMax must be non-negative");
  const bool automatic = opt.hOut < 0;
  int hOut = automatic ? hStart : opt.hOut;
  int h = opt.hSolve >= 0 ? std::max(opt.hSolve, hOut) : hOut + margin;

  SolveReport report;
  PhasorArray best;
  double bestResidual = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass <= opt.maxRefinements; ++pass) {
    h = std::min(h, opt.hMax);
    hOut = std::min(hOut, h);
    PhasorArray candidate = solveAt(h, hOut);
    const double residual = residualOf(candidate);
    report.history.push_back(residual);
    report.iterations = pass + 1;
    if (residual < bestResidual) {
      bestResidual = residual;
      best = std::move(candidate);
      report.finalH = h;
      report.outputOrder = hOut;
    }
    if (residual <= opt.tol) {
      report.converged = true;
      break;
    }
    if (h >= opt.hMax) {
      report.warnings.push_back("hMax reached before the residual tolerance");
      break;
    }
    if (automatic) {
      hOut = grow(hOut, opt.growth);
      h = hOut + margin;
    } else {
      // With a fixed output order the truncation floor cannot be beaten by
      // inflating the operator alone.
      if (pass > 0 && residual > 0.5 * report.history[report.history.size() - 2]) {
        report.warnings.push_back("residual stagnated at the requested output order");
        break;
      }
      h = grow(h, opt.growth);
    }
  }
  report.residualNorm = bestResidual;
  return {std::move(best), std::move(report)};
}

}  // namespace

PhasorArray lyapunovResidual(const PhasorArray& a, const PhasorArray& q, const PhasorArray& p,
                             double period) {
  return p.derivative(period) + a.hermitian() * p + p * a + q;
}

PhasorArray sylvesterResidual(const PhasorArray& a, const PhasorArray& b, const PhasorArray& c,
                              const PhasorArray& x, double period) {
  return x.derivative(period) + a * x + x * b + c;
}

LyapunovSolution solveLyapunov(const PhasorArray& a, const PhasorArray& q, double period,
                               const LyapunovOptions& options) {
  if (a.rows() != a.cols()) throw ValidationError("solveLyapunov: A must be square");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw ValidationError("solveLyapunov: Q must match A");
  }
  requireHermitian(q, "solveLyapunov: Q");
  if (!(period > 0.0)) throw ValidationError("solveLyapunov: period must be positive");
  if (options.checkStability) {
    requireStable(a, period, stabilityCheckOrder(a), "solveLyapunov: A - N is not Hurwitz");
  }

  const Index n = a.rows();
  const bool real = a.isReal() && q.isReal();
  const int hA = a.effectiveOrder();
  const int hStart = std::max({hA, q.effectiveOrder(), 2});

  auto solveAt = [&](int h, int hOut) {
    const Matrix m = harmonicStateMatrix(a, h, period);
    const Matrix x = dense::solveLyapunov(m, -toeplitzBlock(q, h).data);
    ToeplitzBlockMatrix lifted{n, n, h, OperatorKind::general, x};
    PhasorArray p = hermitianPart(extractCentralPhasors(lifted, hOut).phasors);
    return real ? p.realPart() : p;
  };
  auto residualOf = [&](const PhasorArray& p) {
    return lyapunovResidual(a, q, p, period).maxMagnitude();
  };
  auto [p, report] = refine(hStart, hA + 2, options, solveAt, residualOf);
  return {std::move(p), std::move(report)};
}

SylvesterSolution solveSylvester(const PhasorArray& a, const PhasorArray& b, const PhasorArray& c,
                                 double period, const LyapunovOptions& options) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw ValidationError("solveSylvester: A and B must be square");
  }
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw ValidationError("solveSylvester: C must be rows(A) x rows(B)");
  }
  if (!(period > 0.0)) throw ValidationError("solveSylvester: period must be positive");

  const bool real = a.isReal() && b.isReal() && c.isReal();
  const int hAB = std::max(a.effectiveOrder(), b.effectiveOrder());
  const int hStart = std::max({hAB, c.effectiveOrder(), 2});

  auto solveAt = [&](int h, int hOut) {
    const Matrix left = toeplitzBlock(a, h).data + nOperator(a.rows(), h, period).data;
    const Matrix right = toeplitzBlock(b, h).data - nOperator(b.rows(), h, period).data;
    const Matrix x = dense::solveSylvester(left, right, -toeplitzBlock(c, h).data);
    ToeplitzBlockMatrix lifted{c.rows(), c.cols(), h, OperatorKind::general, x};
    PhasorArray out = extractCentralPhasors(lifted, hOut).phasors;
    return real ? out.realPart() : out;
  };
  auto residualOf = [&](const PhasorArray& x) {
    return sylvesterResidual(a, b, c, x, period).maxMagnitude();
  };
  auto [x, report] = refine(hStart, hAB + 2, options, solveAt, residualOf);
  return {std::move(x), std::move(report)};
}

PhasorArray riccatiResidualArray(const PhasorArray& a, const PhasorArray& b, const PhasorArray& q,
                                 const PhasorArray& r, const PhasorArray& s, double period) {
  const PhasorArray sb = s * b;
  return s.derivative(period) + a.hermitian() * s + s * a - sb * inverse(r) * sb.hermitian() + q;
}

double riccatiResidual(const PhasorArray& a, const PhasorArray& b, const PhasorArray& q,
                       const PhasorArray& r, const PhasorArray& s, double period) {
  return riccatiResidualArray(a, b, q, r, s, period).maxMagnitude();
}

RiccatiSolution riccatiKleinman(const PhasorArray& a, const PhasorArray& b, const PhasorArray& q,
                                const PhasorArray& r, const PhasorArray& k0, double period,
                                const RiccatiOptions& options) {
  const Index n = a.rows();
  const Index p = b.cols();
  if (a.cols() != n || b.rows() != n) throw ValidationError("riccatiKleinman: A, B mismatch");
  if (q.rows() != n || q.cols() != n) throw ValidationError("riccatiKleinman: Q must be n x n");
  if (r.rows() != p || r.cols() != p) throw ValidationError("riccatiKleinman: R must be p x p");
  if (k0.rows() != p || k0.cols() != n) throw ValidationError("riccatiKleinman: K0 must be p x n");
  if (options.hTrunc < 0 || options.hMax < options.hTrunc || options.maxIter < 1) {
    throw ValidationError("riccatiKleinman: invalid truncation or iteration options");
  }
  requireHermitian(q, "riccatiKleinman: Q");
  requireHermitian(r, "riccatiKleinman: R");

  const PhasorArray rInv = inverse(r);
  const PhasorArray bH = b.hermitian();
  {
    const PhasorArray closed = a - b * k0;
    const int h = options.stabilityOrder >= 0 ? options.stabilityOrder : stabilityCheckOrder(closed);
    requireStable(closed, period, h, "riccatiKleinman: K0 does not stabilize A - B K0");
  }

  RiccatiSolution out;
  PhasorArray k = k0;
  int hWork = options.hTrunc;
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.maxIter; ++iter) {
    const PhasorArray closed = a - b * k;
    const PhasorArray weight = hermitianPart(q + k.hermitian() * r * k);

    LyapunovOptions lyap;
    lyap.hOut = hWork;
    lyap.hMax = std::max(options.hMax, hWork);
    lyap.maxRefinements = 0;
    lyap.checkStability = false;
    lyap.tol = 0.0;
    const auto step = solveLyapunov(closed, weight, period, lyap);

    PhasorArray s = hermitianPart(step.P);
    if (a.isReal() && b.isReal() && q.isReal() && r.isReal()) s = s.realPart();
    PhasorArray kNext = rInv * bH * s;
    const double residual = riccatiResidual(a, b, q, r, s, period);

    out.report.history.push_back(residual);
    out.report.iterations = iter;
    out.report.finalH = step.report.finalH;
    out.report.outputOrder = s.order();
    out.report.residualNorm = residual;
    out.dcTrace.push_back(s.slice(0).trace().real());
    out.S = s;
    out.K = kNext;

    if (residual <= options.residualThreshold) {
      out.report.converged = true;
      break;
    }
    if (options.autoUpdateH) {
      const bool heavyTail = tailEnergyFraction(kNext) > kTailEnergyLimit;
      const bool stalled = residual > 0.5 * previous;
      if ((heavyTail || stalled) && hWork < options.hMax) {
        hWork = std::min(grow(hWork, 1.5), options.hMax);
      }
    } else {
      kNext = kNext.trunc(options.hTrunc);
    }
    previous = residual;
    k = std::move(kNext);
  }
  if (!out.report.converged) {
    out.report.warnings.push_back("maximum number of Kleinman iterations reached");
  }
  return out;
}

}  // namespace phasor
