#include "phasor/simulation.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "phasor/harmonic_operators.hpp"

namespace phasor {
namespace {

void requireTimes(std::span<const double> times) {
  if (times.empty()) throw ValidationError("simulation: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ValidationError("simulation: times must increase");
  }
}

PhasorArray inputAsColumn(const PhasorArray& u, Index inputs) {
  if (u.rows() == inputs && u.cols() == 1) return u;
  if (u.rows() == 1 && u.cols() == inputs) return u.transpose();
  throw ValidationError("simulation: input dimension does not match the system");
}

// RK4 core: f(t, x) supplied by the caller, output map g(t, x).
template <typename Rhs, typename Out>
Trajectory integrate(std::span<const double> times, const Vector& x0, Index outputs,
                     double maxStep, Rhs&& f, Out&& g) {
  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  const auto count = static_cast<Index>(times.size());
  traj.states.resize(x0.size(), count);
  traj.outputs.resize(outputs, count);
  Vector x = x0;
  traj.states.col(0) = x;
  traj.outputs.col(0) = g(times[0], x);
  for (Index i = 1; i < count; ++i) {
    const double span = times[i] - times[i - 1];
    const auto steps = static_cast<int>(std::ceil(span / maxStep - 1e-9));
    const double dt = span / steps;
    double t = times[i - 1];
    for (int s = 0; s < steps; ++s) {
      const Vector k1 = f(t, x);
      const Vector k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
      const Vector k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
      const Vector k4 = f(t + dt, x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = times[i - 1] + (s + 1) * dt;
    }
    traj.states.col(i) = x;
    traj.outputs.col(i) = g(times[i], x);
  }
  return traj;
}

double stepFor(const PeriodicStateSpace& sys, const SimulationOptions& options) {
  return options.maxStep > 0.0 ? options.maxStep : sys.period() / 1000.0;
}

}  // namespace

PeriodicStateSpace::PeriodicStateSpace(PhasorArray a, PhasorArray b, PhasorArray c,
                                       PhasorArray d, double period)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), period_(period) {
  if (!(period_ > 0.0)) throw ValidationError("PeriodicStateSpace: period must be positive");
  if (a_.rows() != a_.cols()) throw ValidationError("PeriodicStateSpace: A must be square");
  if (b_.rows() != a_.rows()) throw ValidationError("PeriodicStateSpace: B must have n rows");
  if (c_.cols() != a_.rows()) throw ValidationError("PeriodicStateSpace: C must have n columns");
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) {
    throw ValidationError("PeriodicStateSpace: D must be outputs x inputs");
  }
}

PeriodicStateSpace makeSystem(PhasorArray a, PhasorArray b, PhasorArray c, PhasorArray d,
                              double period) {
  return {std::move(a), std::move(b), std::move(c), std::move(d), period};
}

PeriodicStateSpace makeSystem(PhasorArray a, PhasorArray b, double period) {
  const Index n = a.rows();
  const Index p = b.cols();
  return {std::move(a), std::move(b), PhasorArray::eye(n), PhasorArray::zeros(n, p), period};
}

PeriodicStateSpace feedback(const PeriodicStateSpace& sys, const PhasorArray& k) {
  if (k.rows() != sys.inputs() || k.cols() != sys.states()) {
    throw ValidationError("feedback: K must be inputs x states");
  }
  return {sys.a() - sys.b() * k, sys.b(), sys.c() - sys.d() * k, sys.d(), sys.period()};
}

Trajectory simulateInitial(const PeriodicStateSpace& sys, const Vector& x0,
                           std::span<const double> times, const SimulationOptions& options) {
  requireTimes(times);
  if (x0.size() != sys.states()) throw ValidationError("simulateInitial: x0 size mismatch");
  const double w = 2.0 * std::numbers::pi / sys.period();
  return integrate(
      times, x0, sys.outputs(), stepFor(sys, options),
      [&](double t, const Vector& x) -> Vector { return sys.a().evalPhase(w * t) * x; },
      [&](double t, const Vector& x) -> Vector { return sys.c().evalPhase(w * t) * x; });
}

Trajectory simulateForced(const PeriodicStateSpace& sys, std::span<const double> times,
                          const InputSignal& u, const Vector& x0,
                          const SimulationOptions& options) {
  requireTimes(times);
  if (x0.size() != sys.states()) throw ValidationError("simulateForced: x0 size mismatch");
  const double w = 2.0 * std::numbers::pi / sys.period();
  InputFunction input;
  if (const auto* pa = std::get_if<PhasorArray>(&u)) {
    const PhasorArray column = inputAsColumn(*pa, sys.inputs());
    input = [column, w](double t) -> Vector { return column.evalPhase(w * t).col(0); };
  } else {
    input = std::get<InputFunction>(u);
  }
  auto checked = [&](double t) {
    Vector v = input(t);
    if (v.size() != sys.inputs()) throw ValidationError("simulateForced: input size mismatch");
    return v;
  };
  return integrate(
      times, x0, sys.outputs(), stepFor(sys, options),
      [&](double t, const Vector& x) -> Vector {
        return sys.a().evalPhase(w * t) * x + sys.b().evalPhase(w * t) * checked(t);
      },
      [&](double t, const Vector& x) -> Vector {
        return sys.c().evalPhase(w * t) * x + sys.d().evalPhase(w * t) * checked(t);
      });
}

Vector initialPhasorColumn(const Vector& x0, int h) {
  Vector col = Vector::Zero(x0.size() * (2 * h + 1));
  for (Index i = 0; i < x0.size(); ++i) col(i * (2 * h + 1) + h) = x0(i);
  return col;
}

Matrix HarmonicTrajectory::reconstruct(double period) const {
  const double w = 2.0 * std::numbers::pi / period;
  const Index block = 2 * h + 1;
  Matrix x = Matrix::Zero(states, static_cast<Index>(times.size()));
  for (Index c = 0; c < x.cols(); ++c) {
    for (int k = -h; k <= h; ++k) {
      const Complex z = std::polar(1.0, k * w * times[c]);
      for (Index i = 0; i < states; ++i) x(i, c) += phasors(i * block + k + h, c) * z;
    }
  }
  return x;
}

HarmonicTrajectory simulateHarmonic(const PeriodicStateSpace& sys, const Vector& x0Column, int h,
                                    std::span<const double> times,
                                    const std::optional<PhasorArray>& u) {
  requireTimes(times);
  if (h < 0) throw ValidationError("simulateHarmonic: order must be non-negative");
  const Index n = sys.states();
  const Index size = n * (2 * h + 1);
  if (x0Column.size() != size) throw ValidationError("simulateHarmonic: X0 size mismatch");

  // Augmented generator [[A - N, B U], [0, 0]] carries the constant input.
  Matrix gen = Matrix::Zero(size + 1, size + 1);
  gen.topLeftCorner(size, size) = harmonicStateMatrix(sys.a(), h, sys.period());
  if (u) {
    const PhasorArray column = inputAsColumn(*u, sys.inputs());
    gen.topRightCorner(size, 1) =
        toeplitzBlock(sys.b(), h).data * fourierColumn(column, h).data;
  }

  HarmonicTrajectory out;
  out.h = h;
  out.states = n;
  out.times.assign(times.begin(), times.end());
  out.phasors.resize(size, static_cast<Index>(times.size()));
  Vector state(size + 1);
  state << x0Column, Complex(1.0, 0.0);
  out.phasors.col(0) = x0Column;
  std::map<double, Matrix> propagators;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    auto it = propagators.lower_bound(dt * (1.0 - 1e-12));
    if (it == propagators.end() || std::abs(it->first - dt) > 1e-12 * dt) {
      it = propagators.emplace(dt, (gen * dt).exp().eval()).first;
    }
    state = it->second * state;
    out.phasors.col(static_cast<Index>(i)) = state.head(size);
  }
  return out;
}

}  // namespace phasor
