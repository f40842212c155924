#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "phasor/phasor_array.hpp"

namespace phasor {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// One real scalar unknown of the decision matrix P.
///   dc:        P_0(i,j) = P_0(j,i), i <= j (real symmetric DC slice)
///   real/imag: Re or Im of P_k(i,j), k >= 1, with P_{-k} = P_k^*
struct LmiVariable {
  enum class Part { dc, real, imag };
  Part part = Part::dc;
  int k = 0;
  Index i = 0;
  Index j = 0;
};

const char* toString(LmiVariable::Part part);

struct LmiBlockInfo {
  std::string name;
  Index size = 0;
};

/// Affine semidefinite problem  F0_b + sum_v x_v F_{v,b} >= 0  for each block b,
/// maximizing objective . x. Block 0 is T(P) >= 0, block 1 the LQR block
///
///   [ T(A^* P + P A + dP/dt + Q)   T(P B) ]
///   [ T(P B)^*                     T(R)   ]
///
/// with every product formed on phasors before the Toeplitz lift.
/// Coefficient matrices are generated on demand.
class LmiProblem {
 public:
  LmiProblem(PhasorArray a, PhasorArray b, PhasorArray q, PhasorArray r, double period, int hP,
             int ht, int hlmi);

  Index states() const { return a_.rows(); }
  Index inputs() const { return b_.cols(); }
  int orderP() const { return hP_; }
  int orderA() const { return ht_; }
  int orderLmi() const { return hlmi_; }
  double period() const { return period_; }

  const std::vector<LmiVariable>& variables() const { return vars_; }
  const std::vector<double>& objective() const { return objective_; }
  std::vector<LmiBlockInfo> blocks() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// P built from a single unit variable.
  PhasorArray basis(std::size_t v) const;
  Matrix constantTerm(int block) const;
  SparseMatrix coefficient(int block, std::size_t v) const;

  /// Block evaluated at the decision matrix P by direct phasor arithmetic.
  Matrix assemble(int block, const PhasorArray& p) const;

  /// Variable vector of P (imaginary parts of the DC slice are dropped).
  std::vector<double> variablesOf(const PhasorArray& p) const;
  /// Decision matrix of a variable vector.
  PhasorArray importSolution(std::span<const double> x) const;

 private:
  void checkBlock(int block) const;

  PhasorArray a_, b_, q_, r_;
  double period_;
  int hP_, ht_, hlmi_;
  std::vector<LmiVariable> vars_;
  std::vector<double> objective_;
  std::vector<std::string> warnings_;
};

/// Orders default to hlmi = 20, hP = 10, ht = 10.
LmiProblem buildLqrLmi(const PhasorArray& a, const PhasorArray& b, const PhasorArray& q,
                       const PhasorArray& r, double period, int hP = 10, int ht = 10,
                       int hlmi = 20);

struct FeasibilityMargins {
  /// Smallest eigenvalue of each block, in block order.
  std::vector<double> minEigenvalues;
  double worst() const;
};

FeasibilityMargins checkFeasibility(const LmiProblem& problem, const PhasorArray& candidate);

/// Margins of F0 + sum x_v F_v, evaluated through the coefficient matrices.
FeasibilityMargins evaluateMargins(const LmiProblem& problem, std::span<const double> x);

/// Writes the problem in SDPA sparse format (.dat-s). Hermitian blocks are
/// realified as [[Re, -Im], [Im, Re]]; the maximization becomes SDPA's
/// minimization of -objective. A variable map is written to `path` + ".json".
void exportSDPA(const LmiProblem& problem, const std::filesystem::path& path);
std::string toSdpa(const LmiProblem& problem);
std::string variableMapJson(const LmiProblem& problem);

}  // namespace phasor
