#pragma once

#include "phasor/phasor_array.hpp"

namespace phasor::fixtures {

/// MATLAB-style sawtooth of period 2 pi: rises from -1 at theta = 0 to +1 at
/// 2 pi * width, then falls back to -1 at 2 pi.
double sawtoothWave(double theta, double width = 1.0);

/// sawtoothWave(theta, 0.5): triangle peaking at theta = pi.
double triangleWave(double theta);

/// sign(sin(theta)); zero on the discontinuities.
double squareWave(double theta);

/// The 2x2 benchmark matrix
///   [ 3/2 + tri(wt)   1 + cos(wt)          ]
///   [ 1 - sin(2wt)    (square(wt) - 1) / 2 ]
RealMatrix benchmarkMatrix(double t, double period);

/// Benchmark LQR problem: A sampled from benchmarkMatrix, B = [1; sin],
/// Q = 10 I, R = I, K0 = [10, 10].
struct LqrFixture {
  PhasorArray A;
  PhasorArray B;
  PhasorArray Q;
  PhasorArray R;
  PhasorArray K0;
  double period = 1.0;
};

PhasorArray benchmarkPhasors(double period = 1.0, int gridExponent = 6);
LqrFixture benchmarkLqr(double period = 1.0, int gridExponent = 6);

}  // namespace phasor::fixtures
