#include <doctest.h>

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "phasor/fixtures.hpp"
#include "phasor/harmonic_solvers.hpp"
#include "phasor/simulation.hpp"
#include "phasor/spectral.hpp"

using namespace phasor;
using testing::maxAbs;
using testing::realConstant;
using testing::scalar;
using testing::uniformTimes;

namespace {

constexpr double pi = std::numbers::pi;

Vector column(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

const PhasorArray& optimalGain() {
  static const PhasorArray k = [] {
    const auto f = fixtures::benchmarkLqr();
    RiccatiOptions opt;
    opt.hTrunc = 6;
    opt.hMax = 500;
    return riccatiKleinman(f.A, f.B, f.Q, f.R, f.K0, f.period, opt).K;
  }();
  return k;
}

}  // namespace

TEST_CASE("scalar decay") {
  const auto sys = makeSystem(scalar(-1.0), scalar(1.0), 1.0);
  const auto times = uniformTimes(0.0, 1.0, 11);
  const auto traj = simulateInitial(sys, column({1.0}), times);
  CHECK(traj.states.cols() == 11);
  CHECK(traj.outputs.rows() == 1);
  for (Index i = 0; i < 11; ++i) {
    CHECK(std::abs(traj.states(0, i) - std::exp(-times[static_cast<std::size_t>(i)])) < 1e-8);
  }
  CHECK(traj.times == times);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto a = realConstant({{0, 1}, {-4, -0.5}});
  const auto sys = makeSystem(a, realConstant({{0}, {1}}), 1.0);
  const Vector x0 = column({1.0, 0.0});
  const std::vector<double> times{0.0, 1.0};
  const Matrix exact = (Matrix(a.slice(0))).exp() * x0;
  auto error = [&](double step) {
    SimulationOptions opt;
    opt.maxStep = step;
    const auto traj = simulateInitial(sys, x0, times, opt);
    return maxAbs(traj.states.col(1) - exact);
  };
  const double ratio = error(0.1) / error(0.05);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("benchmark open and closed loop") {
  const auto f = fixtures::benchmarkLqr();
  const auto open = makeSystem(f.A, f.B, 1.0);
  const auto times = uniformTimes(0.0, 5.0, 51);
  const Vector x0 = column({1.0, 1.0});
  const auto grow = simulateInitial(open, x0, times);
  CHECK(grow.states.col(50).norm() > 10.0 * x0.norm());

  const auto closed = feedback(open, optimalGain());
  const auto decay = simulateInitial(closed, x0, times);
  CHECK(decay.states.col(50).norm() < 1e-3);
  CHECK(isStable(closed.a(), 20, 1.0).stable);
}

TEST_CASE("forced response") {
  const auto sys = makeSystem(scalar(-1.0), scalar(1.0), 1.0);
  const auto times = uniformTimes(0.0, 2.0, 21);
  SUBCASE("unit step as a constant phasor input") {
    const auto traj = simulateForced(sys, times, scalar(1.0), column({0.0}));
    for (Index i = 0; i < 21; ++i) {
      CHECK(std::abs(traj.states(0, i) - (1.0 - std::exp(-times[static_cast<std::size_t>(i)]))) < 1e-8);
    }
  }
  SUBCASE("callable input agrees with the phasor input") {
    const auto u = scalar(1.0) + PhasorArray::cos();
    const auto viaPhasors = simulateForced(sys, times, u, column({0.5}));
    InputFunction fn = [](double t) { return column({1.0 + std::cos(2 * pi * t)}); };
    const auto viaCallable = simulateForced(sys, times, fn, column({0.5}));
    CHECK(maxAbs(viaPhasors.states - viaCallable.states) < 1e-12);
    CHECK(maxAbs(viaPhasors.states) < 2.5);
  }
  SUBCASE("superposition") {
    const auto f = fixtures::benchmarkLqr();
    const auto bench = makeSystem(f.A, f.B, 1.0);
    const auto t = uniformTimes(0.0, 1.0, 11);
    const Vector x1 = column({1.0, -0.5});
    const Vector x2 = column({0.25, 2.0});
    const auto u1 = PhasorArray::sin();
    const auto u2 = scalar(0.3) + PhasorArray::cos();
    const auto a = simulateForced(bench, t, u1, x1);
    const auto b = simulateForced(bench, t, u2, x2);
    const auto sum = simulateForced(bench, t, u1 + 2.0 * u2, x1 + 2.0 * x2);
    CHECK(maxAbs(sum.states - a.states - 2.0 * b.states) < 1e-9);
  }
  SUBCASE("output equation") {
    const auto full = makeSystem(scalar(-1.0), scalar(1.0), scalar(2.0), scalar(0.5), 1.0);
    const auto traj = simulateForced(full, times, scalar(1.0), column({0.0}));
    CHECK(maxAbs(traj.outputs - (2.0 * traj.states).array().matrix() -
                 Matrix::Constant(1, 21, 0.5)) < 1e-14);
  }
}

TEST_CASE("harmonic simulation") {
  SUBCASE("constant system matches the matrix exponential on k = 0") {
    const auto a = realConstant({{-1, 2}, {-2, -1}});
    const auto sys = makeSystem(a, realConstant({{0}, {1}}), 1.0);
    const Vector x0 = column({1.0, -1.0});
    const auto times = uniformTimes(0.0, 2.0, 9);
    const auto traj = simulateHarmonic(sys, initialPhasorColumn(x0, 3), 3, times);
    CHECK(traj.phasors.rows() == 14);
    for (Index i = 0; i < 9; ++i) {
      const Vector exact = (Matrix(a.slice(0)) * times[static_cast<std::size_t>(i)]).exp() * x0;
      for (Index s = 0; s < 2; ++s) {
        CHECK(std::abs(traj.phasors(s * 7 + 3, i) - exact(s)) < 1e-12);
        for (int k = -3; k <= 3; ++k) {
          if (k != 0) CHECK(std::abs(traj.phasors(s * 7 + 3 + k, i)) < 1e-14);
        }
      }
    }
    CHECK(maxAbs(traj.reconstruct(1.0) - traj.phasors({3, 10}, Eigen::all)) < 1e-12);
  }
  SUBCASE("closed-loop benchmark agrees with time stepping") {
    const auto f = fixtures::benchmarkLqr();
    const auto closed = feedback(makeSystem(f.A, f.B, 1.0), optimalGain());
    const Vector x0 = column({1.0, 1.0});
    const auto times = uniformTimes(0.0, 5.0, 101);
    const auto harmonic = simulateHarmonic(closed, initialPhasorColumn(x0, 20), 20, times);
    const auto reference = simulateInitial(closed, x0, times);
    CHECK(maxAbs(harmonic.reconstruct(1.0) - reference.states) < 1e-3);
  }
  SUBCASE("decay of the harmonic model tracks the Floquet verdict") {
    const auto f = fixtures::benchmarkLqr();
    const auto times = uniformTimes(0.0, 5.0, 6);
    for (const auto& k : {PhasorArray::zeros(1, 2), f.K0}) {
      const auto sys = feedback(makeSystem(f.A, f.B, 1.0), k);
      const auto traj = simulateHarmonic(sys, initialPhasorColumn(column({1.0, 1.0}), 10), 10, times);
      const bool decays = traj.phasors.col(5).norm() < traj.phasors.col(0).norm();
      CHECK(decays == isStable(sys.a(), 10, 1.0).stable);
    }
  }
  SUBCASE("constant input") {
    const auto sys = makeSystem(scalar(-1.0), scalar(1.0), 1.0);
    const auto times = uniformTimes(0.0, 2.0, 5);
    const auto traj = simulateHarmonic(sys, initialPhasorColumn(column({0.0}), 2), 2, times, scalar(1.0));
    for (Index i = 0; i < 5; ++i) {
      CHECK(std::abs(traj.phasors(2, i) - (1.0 - std::exp(-times[static_cast<std::size_t>(i)]))) < 1e-12);
    }
  }
}

TEST_CASE("feedback and validation") {
  const auto sys = makeSystem(realConstant({{0, 1}, {0, 0}}), realConstant({{0}, {1}}),
                              PhasorArray::eye(2), realConstant({{0}, {1}}), 1.0);
  const auto closed = feedback(sys, realConstant({{2, 3}}));
  CHECK(maxAbs(closed.a().slice(0) - Matrix(realConstant({{0, 1}, {-2, -3}}).slice(0))) == 0.0);
  CHECK(maxAbs(closed.c().slice(0) - Matrix(realConstant({{1, 0}, {-2, -2}}).slice(0))) == 0.0);
  CHECK_THROWS_AS(feedback(sys, realConstant({{1, 2, 3}})), ValidationError);
  CHECK_THROWS_AS(makeSystem(PhasorArray::eye(2), realConstant({{1}}), 1.0), ValidationError);
  CHECK_THROWS_AS(makeSystem(PhasorArray::eye(2), realConstant({{1}, {0}}), 0.0), ValidationError);
  const std::vector<double> times{0.0, 1.0};
  CHECK_THROWS_AS(simulateInitial(sys, column({1.0}), times), ValidationError);
  const std::vector<double> backwards{1.0, 0.0};
  CHECK_THROWS_AS(simulateInitial(sys, column({1.0, 0.0}), backwards), ValidationError);
  CHECK_THROWS_AS(simulateForced(sys, times, PhasorArray::eye(2), column({1.0, 0.0})),
                  ValidationError);
  CHECK_THROWS_AS(simulateHarmonic(sys, column({1.0, 0.0}), 2, times), ValidationError);
}
