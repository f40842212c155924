#include "phasor/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace phasor::fixtures {

double sawtoothWave(double theta, double width) {
  constexpr double twoPi = 2.0 * std::numbers::pi;
  double phase = std::fmod(theta, twoPi) / twoPi;
  if (phase < 0.0) phase += 1.0;
  if (phase < width) return -1.0 + 2.0 * phase / width;
  return 1.0 - 2.0 * (phase - width) / (1.0 - width);
}

double triangleWave(double theta) { return sawtoothWave(theta, 0.5); }

double squareWave(double theta) {
  // Exact zeros at multiples of pi; std::sin(pi) is not exactly zero.
  constexpr double pi = std::numbers::pi;
  const double r = std::remainder(theta, pi);
  if (std::abs(r) <= 1e-12 * std::max(1.0, std::abs(theta))) return 0.0;
  const double s = std::sin(theta);
  return s > 0.0 ? 1.0 : -1.0;
}

RealMatrix benchmarkMatrix(double t, double period) {
  const double wt = 2.0 * std::numbers::pi * t / period;
  RealMatrix a(2, 2);
  a << 1.5 + triangleWave(wt), 1.0 + std::cos(wt),
       1.0 - std::sin(2.0 * wt), 0.5 * (squareWave(wt) - 1.0);
  return a;
}

PhasorArray benchmarkPhasors(double period, int gridExponent) {
  return PhasorArray::fromFunction(
      [period](double t) -> Matrix { return benchmarkMatrix(t, period).cast<Complex>(); },
      period, gridExponent);
}

LqrFixture benchmarkLqr(double period, int gridExponent) {
  LqrFixture f;
  f.period = period;
  f.A = benchmarkPhasors(period, gridExponent);
  const Matrix one = Matrix::Ones(1, 1);
  const Matrix zero = Matrix::Zero(1, 1);
  // B = [1; sin(wt)]
  std::vector<Matrix> bSlices{(Matrix(2, 1) << 1.0, 0.0).finished(),
                              (Matrix(2, 1) << 0.0, Complex(0.0, -0.5)).finished()};
  f.B = PhasorArray::fromSlices(bSlices, SliceMode::dcAndPositive);
  f.Q = 10.0 * PhasorArray::eye(2);
  f.R = PhasorArray::eye(1);
  f.K0 = PhasorArray::constant(RealMatrix((RealMatrix(1, 2) << 10.0, 10.0).finished()));
  return f;
}

}  // namespace phasor::fixtures
