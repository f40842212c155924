#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phasor/errors.hpp"

namespace phasor {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

enum class SliceMode { full, dcAndPositive };
enum class NeglectMode { absolute, relative };

/// Truncated Fourier representation of a T-periodic n x m matrix,
///
///   A(t) = sum_{k=-h}^{h} A_k exp(j k w t),   w = 2 pi / T.
///
/// Coefficients are stored as 2h+1 contiguous column-major slices, slice
/// k living at position k+h so the DC term is the central slice. The
/// period is not part of the value: operations that need it take T.
///
/// When isReal() is set the array satisfies A_{-k} == conj(A_k) exactly,
/// i.e. A(t) is real for every t.
///
/// Values are immutable; every operation returns a new array.
class PhasorArray {
 public:
  using SliceMap = Eigen::Map<const Matrix>;
  using SliceFn = std::function<Matrix(int)>;
  using Sampler = std::function<Matrix(double)>;

  /// 1x1 zero.
  PhasorArray();

  /// Takes ownership of coefficients laid out k-major, then column-major
  /// within each slice. With `real` set the conjugate symmetry must hold
  /// to 1e-12 (it is then snapped exact).
  PhasorArray(Index rows, Index cols, int h, std::vector<Complex> coeffs,
              bool real = false);

  /// Builds an array slice by slice. With `real` set only k >= 0 is
  /// requested from `slice`; negative slices are mirrored as conjugates
  /// and the DC slice is made real.
  static PhasorArray generate(Index rows, Index cols, int h, bool real,
                              const SliceFn& slice);

  static PhasorArray fromSlices(std::span<const Matrix> slices,
                                SliceMode mode);
  static PhasorArray constant(const Matrix& value);
  static PhasorArray constant(const RealMatrix& value);

  /// Samples `sampler` on a 2^N grid over one period and keeps harmonics
  /// up to 2^(N-1) - 1. The result is real when every sample is real.
  static PhasorArray fromFunction(const Sampler& sampler, double period,
                                  int gridExponent);

  static PhasorArray zeros(Index rows, Index cols, int h = 0);
  static PhasorArray eye(Index n);
  static PhasorArray sin();
  static PhasorArray cos();
  /// Random real-valued array with slice magnitudes decaying as decay^|k|.
  static PhasorArray random(Index rows, Index cols, int h, std::mt19937_64& rng,
                            double decay = 0.5);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  int order() const { return h_; }
  int sliceCount() const { return 2 * h_ + 1; }
  bool isReal() const { return real_; }
  bool isConstant() const { return h_ == 0; }

  /// Slice A_k; |k| <= order() required.
  SliceMap slice(int k) const;
  /// Slice A_k, or zeros when |k| > order().
  Matrix sliceOrZero(int k) const;
  Complex coeff(Index i, Index j, int k) const;
  std::span<const Complex> coefficients() const { return coeffs_; }

  /// Largest entry magnitude of slice k (0 outside the stored range).
  double sliceMagnitude(int k) const;
  /// Largest coefficient magnitude over all slices.
  double maxMagnitude() const;

  PhasorArray transpose() const;
  PhasorArray hermitian() const;
  PhasorArray conj() const;
  PhasorArray derivative(double period) const;
  PhasorArray trunc(int hNew) const;
  PhasorArray neglect(double threshold, NeglectMode mode) const;
  PhasorArray elementAt(Index i, Index j) const;
  /// Real part of A(t): (A + conj(A)) / 2, flagged real.
  PhasorArray realPart() const;
  /// Order after dropping trailing slices below relTol * maxMagnitude().
  int effectiveOrder(double relTol = 1e-13) const;
  /// Drops the real flag; coefficients unchanged.
  PhasorArray asComplex() const;

  Matrix evalPhase(double theta) const;
  Matrix evalTime(double period, double t) const;
  std::vector<Matrix> evalTime(double period, std::span<const double> times) const;

  PhasorArray operator-() const;
  friend PhasorArray operator+(const PhasorArray& a, const PhasorArray& b);
  friend PhasorArray operator-(const PhasorArray& a, const PhasorArray& b);
  /// Exact harmonic convolution; the output order is h_a + h_b.
  friend PhasorArray operator*(const PhasorArray& a, const PhasorArray& b);
  friend PhasorArray operator*(double s, const PhasorArray& a);
  friend PhasorArray operator*(Complex s, const PhasorArray& a);

 private:
  Index offset(int k) const { return static_cast<Index>(k + h_) * rows_ * cols_; }

  Index rows_ = 1;
  Index cols_ = 1;
  int h_ = 0;
  bool real_ = false;
  std::vector<Complex> coeffs_;
};

struct InverseOptions {
  /// Sampling grid exponent; 0 selects the smallest N >= 8 with
  /// 2^(N-1) - 1 >= 4 h.
  int gridExponent = 0;
  /// Absolute neglect threshold applied after inversion.
  double threshold = 1e-12;
  /// Largest tolerated sample condition number.
  double conditionBound = 1e12;
};

/// Pointwise inverse A(t)^{-1} reconstructed from sampled inverses.
PhasorArray inverse(const PhasorArray& a, const InverseOptions& options = {});

/// (A + A^*) / 2, hermitian-valued.
PhasorArray hermitianPart(const PhasorArray& a);

/// Largest absolute coefficient difference, padding the shorter array.
double maxDifference(const PhasorArray& a, const PhasorArray& b);

/// Energy fraction (sum |c|^2) carried by the outermost ceil(fraction * h)
/// slices on each side.
double tailEnergyFraction(const PhasorArray& a, double fraction = 0.2);

/// Uniformly sampled sliding Fourier decomposition of a signal.
struct PhasorTrajectory {
  std::vector<int> kSet;
  std::vector<double> times;
  /// values[c](kIndex, timeIndex) = X_k(t) for component c.
  std::vector<Matrix> values;
};

/// X_k(t) = (1/T) int_{t-T}^{t} x(tau) exp(-j k w tau) dtau by trapezoidal
/// quadrature over the trailing window, for every sample time at least one
/// period after the first. `samples` is components x times.
PhasorTrajectory slidingFourier(std::span<const double> times,
                                const Matrix& samples, double period,
                                std::span<const int> kSet);

}  // namespace phasor
