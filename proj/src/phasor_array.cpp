#include "phasor/phasor_array.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace phasor {
namespace {

constexpr double kSymmetryTolerance = 1e-12;

double angularFrequency(double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ValidationError("period must be positive and finite");
  }
  return 2.0 * std::numbers::pi / period;
}

bool isConjugateSymmetric(Index rows, Index cols, int h,
                          const std::vector<Complex>& c, double tol) {
  const Index slice = rows * cols;
  for (int k = 0; k <= h; ++k) {
    const Index pos = static_cast<Index>(h + k) * slice;
    const Index neg = static_cast<Index>(h - k) * slice;
    for (Index e = 0; e < slice; ++e) {
      if (std::abs(c[neg + e] - std::conj(c[pos + e])) > tol) return false;
    }
  }
  return true;
}

void snapConjugateSymmetric(Index rows, Index cols, int h,
                            std::vector<Complex>& c) {
  const Index slice = rows * cols;
  for (Index e = 0; e < slice; ++e) {
    Complex& dc = c[static_cast<Index>(h) * slice + e];
    dc = Complex(dc.real(), 0.0);
  }
  for (int k = 1; k <= h; ++k) {
    const Index pos = static_cast<Index>(h + k) * slice;
    const Index neg = static_cast<Index>(h - k) * slice;
    for (Index e = 0; e < slice; ++e) c[neg + e] = std::conj(c[pos + e]);
  }
}

// Harmonics -h..h of uniformly sampled one-period data via FFT.
PhasorArray fromSamples(const std::vector<Matrix>& samples, int h, bool real) {
  const Index rows = samples.front().rows();
  const Index cols = samples.front().cols();
  const auto count = static_cast<Index>(samples.size());
  std::vector<Complex> coeffs(static_cast<std::size_t>((2 * h + 1) * rows * cols));
  Eigen::FFT<double> fft;
  std::vector<Complex> series(static_cast<std::size_t>(count));
  std::vector<Complex> spectrum;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      for (Index q = 0; q < count; ++q) series[q] = samples[q](i, j);
      fft.fwd(spectrum, series);
      for (int k = -h; k <= h; ++k) {
        const Index bin = k >= 0 ? k : count + k;
        coeffs[static_cast<std::size_t>((k + h) * rows * cols + j * rows + i)] =
            spectrum[bin] / static_cast<double>(count);
      }
    }
  }
  if (real) snapConjugateSymmetric(rows, cols, h, coeffs);
  return PhasorArray(rows, cols, h, std::move(coeffs), real);
}

}  // namespace

PhasorArray::PhasorArray() : coeffs_(1, Complex(0.0, 0.0)) {}

PhasorArray::PhasorArray(Index rows, Index cols, int h,
                         std::vector<Complex> coeffs, bool real)
    : rows_(rows), cols_(cols), h_(h), real_(real), coeffs_(std::move(coeffs)) {
  if (rows < 1 || cols < 1) throw ValidationError("PhasorArray dimensions must be positive");
  if (h < 0) throw ValidationError("PhasorArray order must be non-negative");
  if (static_cast<Index>(coeffs_.size()) != rows * cols * (2 * h + 1)) {
    std::ostringstream msg;
    msg << "PhasorArray expects " << rows * cols * (2 * h + 1)
        << " coefficients, got " << coeffs_.size();
    throw ValidationError(msg.str());
  }
  if (real_) {
    if (!isConjugateSymmetric(rows_, cols_, h_, coeffs_, kSymmetryTolerance)) {
      throw ValidationError("real-valued PhasorArray requires A_{-k} = conj(A_k)");
    }
    snapConjugateSymmetric(rows_, cols_, h_, coeffs_);
  }
}

PhasorArray PhasorArray::generate(Index rows, Index cols, int h, bool real,
                                  const SliceFn& slice) {
  if (rows < 1 || cols < 1 || h < 0) throw ValidationError("invalid PhasorArray shape");
  std::vector<Complex> coeffs(static_cast<std::size_t>((2 * h + 1) * rows * cols));
  const Index size = rows * cols;
  for (int k = real ? 0 : -h; k <= h; ++k) {
    const Matrix s = slice(k);
    if (s.rows() != rows || s.cols() != cols) {
      throw ValidationError("slice generator returned a matrix of the wrong size");
    }
    std::copy(s.data(), s.data() + size, coeffs.begin() + (k + h) * size);
  }
  if (real) snapConjugateSymmetric(rows, cols, h, coeffs);
  return PhasorArray(rows, cols, h, std::move(coeffs), real);
}

PhasorArray PhasorArray::fromSlices(std::span<const Matrix> slices, SliceMode mode) {
  if (slices.empty()) throw ValidationError("fromSlices needs at least one slice");
  const Index rows = slices.front().rows();
  const Index cols = slices.front().cols();
  for (const auto& s : slices) {
    if (s.rows() != rows || s.cols() != cols) {
      throw ValidationError("fromSlices: inconsistent slice dimensions");
    }
  }
  if (mode == SliceMode::dcAndPositive) {
    const int h = static_cast<int>(slices.size()) - 1;
    return generate(rows, cols, h, true, [&](int k) { return slices[k]; });
  }
  if (slices.size() % 2 == 0) {
    throw ValidationError("fromSlices: full mode needs an odd number of slices");
  }
  const int h = static_cast<int>(slices.size() / 2);
  std::vector<Complex> coeffs;
  coeffs.reserve(slices.size() * static_cast<std::size_t>(rows * cols));
  for (const auto& s : slices) coeffs.insert(coeffs.end(), s.data(), s.data() + s.size());
  const bool real = isConjugateSymmetric(rows, cols, h, coeffs, kSymmetryTolerance);
  return PhasorArray(rows, cols, h, std::move(coeffs), real);
}

PhasorArray PhasorArray::constant(const Matrix& value) {
  std::vector<Matrix> one{value};
  return fromSlices(one, SliceMode::full);
}

PhasorArray PhasorArray::constant(const RealMatrix& value) {
  return generate(value.rows(), value.cols(), 0, true,
                  [&](int) -> Matrix { return value.cast<Complex>(); });
}

PhasorArray PhasorArray::fromFunction(const Sampler& sampler, double period,
                                      int gridExponent) {
  angularFrequency(period);
  if (gridExponent < 2 || gridExponent > 24) {
    throw ValidationError("fromFunction: grid exponent must lie in [2, 24]");
  }
  const Index count = Index{1} << gridExponent;
  std::vector<Matrix> samples;
  samples.reserve(static_cast<std::size_t>(count));
  bool real = true;
  for (Index q = 0; q < count; ++q) {
    const double t = period * static_cast<double>(q) / static_cast<double>(count);
    Matrix s = sampler(t);
    if (!samples.empty() &&
        (s.rows() != samples.front().rows() || s.cols() != samples.front().cols())) {
      throw ValidationError("fromFunction: sampler returned inconsistent dimensions");
    }
    if (s.size() == 0) throw ValidationError("fromFunction: sampler returned an empty matrix");
    if (!s.allFinite()) {
      std::ostringstream msg;
      msg << "fromFunction: non-finite sample at t = " << t;
      throw ValidationError(msg.str());
    }
    real = real && (s.imag().array() == 0.0).all();
    samples.push_back(std::move(s));
  }
  return fromSamples(samples, static_cast<int>(count / 2 - 1), real);
}

PhasorArray PhasorArray::zeros(Index rows, Index cols, int h) {
  return generate(rows, cols, h, true, [&](int) { return Matrix::Zero(rows, cols).eval(); });
}

PhasorArray PhasorArray::eye(Index n) {
  return constant(RealMatrix::Identity(n, n).eval());
}

PhasorArray PhasorArray::sin() {
  return generate(1, 1, 1, true, [](int k) {
    return Matrix::Constant(1, 1, k == 1 ? Complex(0.0, -0.5) : Complex(0.0, 0.0)).eval();
  });
}

PhasorArray PhasorArray::cos() {
  return generate(1, 1, 1, true, [](int k) {
    return Matrix::Constant(1, 1, k == 1 ? Complex(0.5, 0.0) : Complex(0.0, 0.0)).eval();
  });
}

PhasorArray PhasorArray::random(Index rows, Index cols, int h, std::mt19937_64& rng,
                                double decay) {
  std::normal_distribution<double> normal;
  return generate(rows, cols, h, true, [&](int k) {
    const double scale = std::pow(decay, k);
    Matrix s(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) {
        s(i, j) = scale * Complex(normal(rng), k == 0 ? 0.0 : normal(rng));
      }
    }
    return s;
  });
}

PhasorArray::SliceMap PhasorArray::slice(int k) const {
  if (k < -h_ || k > h_) throw ValidationError("slice index outside the stored harmonic range");
  return SliceMap(coeffs_.data() + offset(k), rows_, cols_);
}

Matrix PhasorArray::sliceOrZero(int k) const {
  if (k < -h_ || k > h_) return Matrix::Zero(rows_, cols_);
  return slice(k);
}

Complex PhasorArray::coeff(Index i, Index j, int k) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw ValidationError("coefficient index out of range");
  if (k < -h_ || k > h_) return Complex(0.0, 0.0);
  return coeffs_[static_cast<std::size_t>(offset(k) + j * rows_ + i)];
}

double PhasorArray::sliceMagnitude(int k) const {
  if (k < -h_ || k > h_) return 0.0;
  return slice(k).cwiseAbs().maxCoeff();
}

double PhasorArray::maxMagnitude() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

PhasorArray PhasorArray::transpose() const {
  return generate(cols_, rows_, h_, real_, [&](int k) { return slice(k).transpose().eval(); });
}

PhasorArray PhasorArray::hermitian() const {
  return generate(cols_, rows_, h_, real_, [&](int k) { return slice(-k).adjoint().eval(); });
}

PhasorArray PhasorArray::conj() const {
  return generate(rows_, cols_, h_, real_, [&](int k) { return slice(-k).conjugate().eval(); });
}

PhasorArray PhasorArray::derivative(double period) const {
  const double w = angularFrequency(period);
  return generate(rows_, cols_, h_, real_, [&](int k) {
    return (Complex(0.0, w * k) * slice(k)).eval();
  });
}

PhasorArray PhasorArray::trunc(int hNew) const {
  if (hNew < 0) throw ValidationError("trunc: order must be non-negative");
  return generate(rows_, cols_, hNew, real_, [&](int k) { return sliceOrZero(k); });
}

PhasorArray PhasorArray::neglect(double threshold, NeglectMode mode) const {
  if (!(threshold >= 0.0)) throw ValidationError("neglect: threshold must be non-negative");
  double cut = threshold;
  if (mode == NeglectMode::relative) {
    double largest = 0.0;
    for (int k = -h_; k <= h_; ++k) largest = std::max(largest, sliceMagnitude(k));
    cut = threshold * largest;
  }
  std::vector<bool> keep(static_cast<std::size_t>(2 * h_ + 1), true);
  int hKept = 0;
  for (int k = -h_; k <= h_; ++k) {
    if (k != 0 && sliceMagnitude(k) < cut) keep[k + h_] = false;
    if (keep[k + h_]) hKept = std::max(hKept, std::abs(k));
  }
  return generate(rows_, cols_, hKept, real_, [&](int k) {
    return keep[k + h_] ? sliceOrZero(k) : Matrix::Zero(rows_, cols_).eval();
  });
}

PhasorArray PhasorArray::elementAt(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
    throw ValidationError("elementAt: index out of range");
  }
  return generate(1, 1, h_, real_, [&](int k) {
    return Matrix::Constant(1, 1, slice(k)(i, j)).eval();
  });
}

PhasorArray PhasorArray::realPart() const {
  return generate(rows_, cols_, h_, true, [&](int k) {
    return (0.5 * (slice(k) + slice(-k).conjugate())).eval();
  });
}

int PhasorArray::effectiveOrder(double relTol) const {
  const double cut = relTol * maxMagnitude();
  int h = h_;
  while (h > 0 && sliceMagnitude(h) <= cut && sliceMagnitude(-h) <= cut) --h;
  return h;
}

PhasorArray PhasorArray::asComplex() const {
  PhasorArray out = *this;
  out.real_ = false;
  return out;
}

Matrix PhasorArray::evalPhase(double theta) const {
  Matrix sum = slice(0);
  for (int k = 1; k <= h_; ++k) {
    const Complex z = std::polar(1.0, k * theta);
    sum += z * slice(k) + std::conj(z) * slice(-k);
  }
  if (real_) sum = sum.real().cast<Complex>();
  return sum;
}

Matrix PhasorArray::evalTime(double period, double t) const {
  return evalPhase(angularFrequency(period) * t);
}

std::vector<Matrix> PhasorArray::evalTime(double period,
                                          std::span<const double> times) const {
  const double w = angularFrequency(period);
  std::vector<Matrix> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evalPhase(w * t));
  return out;
}

PhasorArray PhasorArray::operator-() const { return -1.0 * *this; }

PhasorArray operator+(const PhasorArray& a, const PhasorArray& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("add: dimension mismatch");
  }
  const int h = std::max(a.order(), b.order());
  return PhasorArray::generate(a.rows(), a.cols(), h, a.isReal() && b.isReal(), [&](int k) {
    return (a.sliceOrZero(k) + b.sliceOrZero(k)).eval();
  });
}

PhasorArray operator-(const PhasorArray& a, const PhasorArray& b) { return a + (-b); }

PhasorArray operator*(const PhasorArray& a, const PhasorArray& b) {
  if (a.cols() != b.rows()) throw ValidationError("mul: inner dimension mismatch");
  const int h = a.order() + b.order();
  return PhasorArray::generate(a.rows(), b.cols(), h, a.isReal() && b.isReal(), [&](int k) {
    Matrix sum = Matrix::Zero(a.rows(), b.cols());
    const int lo = std::max(-a.order(), k - b.order());
    const int hi = std::min(a.order(), k + b.order());
    for (int i = lo; i <= hi; ++i) sum.noalias() += a.slice(i) * b.slice(k - i);
    return sum;
  });
}

PhasorArray operator*(double s, const PhasorArray& a) {
  return PhasorArray::generate(a.rows(), a.cols(), a.order(), a.isReal(),
                               [&](int k) { return (s * a.slice(k)).eval(); });
}

PhasorArray operator*(Complex s, const PhasorArray& a) {
  return PhasorArray::generate(a.rows(), a.cols(), a.order(),
                               a.isReal() && s.imag() == 0.0,
                               [&](int k) { return (s * a.slice(k)).eval(); });
}

PhasorArray inverse(const PhasorArray& a, const InverseOptions& options) {
  if (a.rows() != a.cols()) throw ValidationError("inverse: matrix must be square");
  if (a.isConstant()) {
    Eigen::JacobiSVD<Matrix> svd(a.slice(0));
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) == 0.0 || sv(0) / sv(sv.size() - 1) > options.conditionBound) {
      throw NumericalError("inverse: constant matrix is singular or ill-conditioned");
    }
    Matrix inv = a.slice(0).inverse();
    if (a.isReal()) return PhasorArray::constant(RealMatrix(inv.real()));
    return PhasorArray::constant(inv);
  }
  int grid = options.gridExponent;
  if (grid == 0) {
    grid = 8;
    while ((1 << (grid - 1)) - 1 < 4 * a.order()) ++grid;
  }
  if (grid < 2 || grid > 24) throw ValidationError("inverse: grid exponent out of range");
  const Index count = Index{1} << grid;
  // Conditioning is judged against the largest singular value over the whole
  // period, so a scalar passing through zero counts as singular.
  std::vector<Matrix> samples;
  std::vector<double> smallest;
  samples.reserve(static_cast<std::size_t>(count));
  double largest = 0.0;
  for (Index q = 0; q < count; ++q) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(count);
    samples.push_back(a.evalPhase(theta));
    Eigen::JacobiSVD<Matrix> svd(samples.back());
    const auto& sv = svd.singularValues();
    largest = std::max(largest, sv(0));
    smallest.push_back(sv(sv.size() - 1));
  }
  for (Index q = 0; q < count; ++q) {
    if (smallest[q] == 0.0 || largest / smallest[q] > options.conditionBound) {
      std::ostringstream msg;
      msg << "inverse: singular sample at t/T = "
          << static_cast<double>(q) / static_cast<double>(count);
      throw NumericalError(msg.str());
    }
    samples[q] = samples[q].inverse().eval();
  }
  return fromSamples(samples, static_cast<int>(count / 2 - 1), a.isReal())
      .neglect(options.threshold, NeglectMode::absolute);
}

PhasorArray hermitianPart(const PhasorArray& a) {
  if (a.rows() != a.cols()) throw ValidationError("hermitianPart: matrix must be square");
  return 0.5 * (a + a.hermitian());
}

double maxDifference(const PhasorArray& a, const PhasorArray& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("maxDifference: dimension mismatch");
  }
  const int h = std::max(a.order(), b.order());
  double m = 0.0;
  for (int k = -h; k <= h; ++k) {
    m = std::max(m, (a.sliceOrZero(k) - b.sliceOrZero(k)).cwiseAbs().maxCoeff());
  }
  return m;
}

double tailEnergyFraction(const PhasorArray& a, double fraction) {
  const int h = a.order();
  if (h == 0) return 0.0;
  const int width = std::max(1, static_cast<int>(std::ceil(fraction * h)));
  double total = 0.0;
  double tail = 0.0;
  for (int k = -h; k <= h; ++k) {
    const double e = a.slice(k).squaredNorm();
    total += e;
    if (std::abs(k) > h - width) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

PhasorTrajectory slidingFourier(std::span<const double> times, const Matrix& samples,
                                double period, std::span<const int> kSet) {
  const double w = angularFrequency(period);
  const auto count = static_cast<Index>(times.size());
  if (samples.cols() != count) {
    throw ValidationError("slidingFourier: sample count does not match time grid");
  }
  if (count < 2) throw ValidationError("slidingFourier: need at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(count - 1);
  if (!(dt > 0.0)) throw ValidationError("slidingFourier: times must increase");
  for (Index q = 1; q < count; ++q) {
    if (std::abs(times[q] - times[q - 1] - dt) > 1e-6 * dt) {
      throw ValidationError("slidingFourier: sampling must be uniform");
    }
  }
  const auto window = static_cast<Index>(std::llround(period / dt));
  if (window < 1 || std::abs(static_cast<double>(window) * dt - period) > dt) {
    throw ValidationError("slidingFourier: step does not divide the period");
  }
  if (window >= count) throw ValidationError("slidingFourier: samples span less than one period");

  PhasorTrajectory out;
  out.kSet.assign(kSet.begin(), kSet.end());
  out.times.assign(times.begin() + window, times.end());
  const Index outCount = count - window;
  const double span = static_cast<double>(window) * dt;
  out.values.assign(static_cast<std::size_t>(samples.rows()),
                    Matrix::Zero(static_cast<Index>(kSet.size()), outCount));
  std::vector<Complex> prefix(static_cast<std::size_t>(count + 1));
  std::vector<Complex> integrand(static_cast<std::size_t>(count));
  for (Index c = 0; c < samples.rows(); ++c) {
    for (std::size_t ki = 0; ki < kSet.size(); ++ki) {
      const int k = kSet[ki];
      prefix[0] = 0.0;
      for (Index q = 0; q < count; ++q) {
        integrand[q] = samples(c, q) * std::polar(1.0, -k * w * times[q]);
        prefix[q + 1] = prefix[q] + integrand[q];
      }
      for (Index i = window; i < count; ++i) {
        const Complex sum = prefix[i + 1] - prefix[i - window];
        const Complex trap = dt * (sum - 0.5 * (integrand[i - window] + integrand[i]));
        out.values[c](static_cast<Index>(ki), i - window) = trap / span;
      }
    }
  }
  return out;
}

}  // namespace phasor
