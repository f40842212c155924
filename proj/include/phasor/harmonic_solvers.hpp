#pragma once

#include <string>
#include <vector>

#include "phasor/phasor_array.hpp"

namespace phasor {

struct SolveReport {
  int iterations = 0;
  /// Largest phasor magnitude of the time-domain residual equation.
  double residualNorm = 0.0;
  /// Inflated operator order used by the last dense solve.
  int finalH = 0;
  /// Harmonic order of the returned solution.
  int outputOrder = 0;
  bool converged = false;
  std::vector<double> history;
  std::vector<std::string> warnings;
};

struct LyapunovOptions {
  /// Output order; < 0 grows it together with the solve order.
  int hOut = -1;
  /// Initial inflated order; < 0 selects hOut + effective order of A + 2.
  int hSolve = -1;
  int hMax = 400;
  double tol = 1e-8;
  /// Maximum number of order increases after the first solve.
  int maxRefinements = 12;
  double growth = 1.5;
  /// Reject A when its fundamental Floquet exponents are not all stable.
  bool checkStability = true;
};

struct LyapunovSolution {
  PhasorArray P;
  SolveReport report;
};

/// T-periodic P with  dP/dt + A^* P + P A + Q = 0.
///
/// Solves (T(A)-N)^* X + X (T(A)-N) + T(Q) = 0 at an inflated order H,
/// averages the central diagonals of X into phasors and certifies the
/// result by evaluating the residual with exact phasor arithmetic. H (and
/// the output order in automatic mode) grows geometrically until the
/// certificate passes tol or hMax is reached; the best iterate is kept.
LyapunovSolution solveLyapunov(const PhasorArray& a, const PhasorArray& q, double period,
                               const LyapunovOptions& options = {});

struct SylvesterSolution {
  PhasorArray X;
  SolveReport report;
};

/// T-periodic X with  dX/dt + A X + X B + C = 0, same scheme as
/// solveLyapunov applied to (T(A)+N) X + X (T(B)-N) + T(C) = 0.
SylvesterSolution solveSylvester(const PhasorArray& a, const PhasorArray& b,
                                 const PhasorArray& c, double period,
                                 const LyapunovOptions& options = {});

PhasorArray lyapunovResidual(const PhasorArray& a, const PhasorArray& q,
                             const PhasorArray& p, double period);
PhasorArray sylvesterResidual(const PhasorArray& a, const PhasorArray& b,
                              const PhasorArray& c, const PhasorArray& x, double period);

struct RiccatiOptions {
  /// Initial working order of the Lyapunov iterates.
  int hTrunc = 6;
  int hMax = 500;
  bool autoUpdateH = true;
  int maxIter = 50;
  double residualThreshold = 1e-6;
  /// Harmonic order used to check that K0 stabilizes; < 0 picks one.
  int stabilityOrder = -1;
};

struct RiccatiSolution {
  PhasorArray K;
  PhasorArray S;
  SolveReport report;
  /// trace(S_0) of each iterate.
  std::vector<double> dcTrace;
};

/// Kleinman iteration for the periodic Riccati equation
///   dS/dt + A^* S + S A - S B R^{-1} B^* S + Q = 0,
/// K = R^{-1} B^* S. K0 must stabilize A - B K0.
RiccatiSolution riccatiKleinman(const PhasorArray& a, const PhasorArray& b,
                                const PhasorArray& q, const PhasorArray& r,
                                const PhasorArray& k0, double period,
                                const RiccatiOptions& options = {});

PhasorArray riccatiResidualArray(const PhasorArray& a, const PhasorArray& b,
                                 const PhasorArray& q, const PhasorArray& r,
                                 const PhasorArray& s, double period);

/// Largest phasor magnitude of riccatiResidualArray.
double riccatiResidual(const PhasorArray& a, const PhasorArray& b, const PhasorArray& q,
                       const PhasorArray& r, const PhasorArray& s, double period);

}  // namespace phasor
