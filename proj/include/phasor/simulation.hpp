#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "phasor/phasor_array.hpp"

namespace phasor {

/// x' = A(t) x + B(t) u,  y = C(t) x + D(t) u  with T-periodic matrices.
class PeriodicStateSpace {
 public:
  PeriodicStateSpace(PhasorArray a, PhasorArray b, PhasorArray c, PhasorArray d, double period);

  const PhasorArray& a() const { return a_; }
  const PhasorArray& b() const { return b_; }
  const PhasorArray& c() const { return c_; }
  const PhasorArray& d() const { return d_; }
  double period() const { return period_; }
  Index states() const { return a_.rows(); }
  Index inputs() const { return b_.cols(); }
  Index outputs() const { return c_.rows(); }

 private:
  PhasorArray a_, b_, c_, d_;
  double period_;
};

PeriodicStateSpace makeSystem(PhasorArray a, PhasorArray b, PhasorArray c, PhasorArray d,
                              double period);
/// Full-state output: C = I, D = 0.
PeriodicStateSpace makeSystem(PhasorArray a, PhasorArray b, double period);

/// Closed loop for u = -K x + v.
PeriodicStateSpace feedback(const PeriodicStateSpace& sys, const PhasorArray& k);

struct SimulationOptions {
  /// Largest RK4 step; <= 0 selects T / 1000.
  double maxStep = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  /// states x times
  Matrix states;
  /// outputs x times
  Matrix outputs;
};

using InputFunction = std::function<Vector(double)>;
/// A p x 1 (or 1 x p) PhasorArray evaluated on the system period, or a callable.
using InputSignal = std::variant<PhasorArray, InputFunction>;

/// Fixed-step classical RK4 of x' = A(t) x from x(times[0]) = x0.
Trajectory simulateInitial(const PeriodicStateSpace& sys, const Vector& x0,
                           std::span<const double> times, const SimulationOptions& options = {});

Trajectory simulateForced(const PeriodicStateSpace& sys, std::span<const double> times,
                          const InputSignal& u, const Vector& x0,
                          const SimulationOptions& options = {});

struct HarmonicTrajectory {
  int h = 0;
  Index states = 0;
  std::vector<double> times;
  /// Phasor stack ((2h+1) n) x times, Toeplitz-block row order.
  Matrix phasors;

  /// x(t) = sum_k X_k(t) exp(j k w t) at every stored time.
  Matrix reconstruct(double period) const;
};

/// Integrates the truncated harmonic model X' = (T(A) - N) X + T(B) U with
/// exact matrix-exponential steps. U is the constant phasor stack of a
/// periodic PhasorArray input.
HarmonicTrajectory simulateHarmonic(const PeriodicStateSpace& sys, const Vector& x0Column, int h,
                                    std::span<const double> times,
                                    const std::optional<PhasorArray>& u = std::nullopt);

/// Phasor stack of a constant initial state: x0 on the k = 0 rows.
Vector initialPhasorColumn(const Vector& x0, int h);

}  // namespace phasor
