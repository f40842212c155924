#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "phasor/fixtures.hpp"
#include "phasor/spectral.hpp"

using namespace phasor;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> sortedReal(const std::vector<Complex>& v) {
  std::vector<double> out;
  for (auto z : v) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("benchmark exponents") {
  const auto a = fixtures::benchmarkPhasors();
  const auto r = floquetExponents(a, 10, 1.0);
  REQUIRE(r.fundamental.size() == 2);
  REQUIRE(r.concentration.size() == 2);
  CHECK(r.allEigen.size() == 42);
  CHECK(r.h == 10);
  const auto re = sortedReal(r.fundamental);
  CHECK(std::abs(re[0] - (-0.9060)) < 1e-2);
  CHECK(std::abs(re[1] - 1.9060) < 1e-2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.concentration[i] > 0.5);
    CHECK(r.concentration[i] <= 1.0);
    CHECK(r.fundamental[i].imag() > -pi);
    CHECK(r.fundamental[i].imag() <= pi);
  }
  // the input is not band-limited below 2h
  CHECK(!r.warnings.empty());

  SUBCASE("order convergence") {
    const auto r15 = floquetExponents(a, 15, 1.0);
    const auto re15 = sortedReal(r15.fundamental);
    CHECK(std::abs(re15[0] - re[0]) < 1e-3);
    CHECK(std::abs(re15[1] - re[1]) < 1e-3);
  }
  SUBCASE("real systems have conjugate-closed exponents") {
    for (auto z : r.fundamental) {
      const bool closed = std::any_of(r.fundamental.begin(), r.fundamental.end(), [&](Complex w) {
        return std::abs(w - std::conj(z)) < 1e-8;
      });
      CHECK(closed);
    }
  }
  SUBCASE("verdict") {
    const auto v = isStable(a, 10, 1.0);
    CHECK_FALSE(v.stable);
    CHECK(std::abs(v.worst.real() - 1.9060) < 1e-2);
  }
}

TEST_CASE("scalar periodic exponent is the time average") {
  const auto a = testing::scalar(-0.8) + 1.5 * PhasorArray::cos();
  const auto r = floquetExponents(a, 20, 1.0);
  REQUIRE(r.fundamental.size() == 1);
  CHECK(std::abs(r.fundamental[0] - Complex(-0.8, 0.0)) < 1e-10);

  const auto b = testing::scalar(0.3) + PhasorArray::sin() * testing::scalar(2.0);
  CHECK(std::abs(floquetExponents(b, 25, 2.0).fundamental[0] - Complex(0.3, 0.0)) < 1e-10);
}

TEST_CASE("constant matrices") {
  const auto a = testing::realConstant({{-1, 4}, {-2, -1}});
  const double omega = 2 * pi;
  const auto r = floquetExponents(a, 6, 1.0);
  REQUIRE(r.fundamental.size() == 2);
  Eigen::ComplexEigenSolver<Matrix> lti(a.slice(0));
  for (Index i = 0; i < 2; ++i) {
    const Complex ref = foldToStrip(lti.eigenvalues()(i), omega);
    const bool found = std::any_of(r.fundamental.begin(), r.fundamental.end(),
                                   [&](Complex z) { return std::abs(z - ref) < 1e-10; });
    CHECK(found);
  }
  CHECK(r.warnings.empty());

  SUBCASE("folded spectrum clusters on the LTI eigenvalues") {
    const auto all = floquetExponents(a, 6, 1.0, FloquetMode::all);
    CHECK(all.fundamental.empty());
    CHECK(all.allEigen.size() == 26);
    double spread = 0.0;
    for (auto z : all.allEigen) {
      const Complex f = foldToStrip(z, omega);
      double nearest = 1e300;
      for (Index i = 0; i < 2; ++i) {
        nearest = std::min(nearest, std::abs(f - foldToStrip(lti.eigenvalues()(i), omega)));
      }
      spread = std::max(spread, nearest);
    }
    CHECK(spread < 1e-10);
  }
}

TEST_CASE("strip folding") {
  const double w = 2.0;
  CHECK(foldToStrip({0.5, 1.0}, w) == Complex(0.5, 1.0));
  CHECK(foldToStrip({0.5, -1.0}, w) == Complex(0.5, 1.0));
  CHECK(std::abs(foldToStrip({-1.0, 7.3}, w) - Complex(-1.0, -0.7)) < 1e-14);
  CHECK(std::abs(foldToStrip({0.0, -4.5}, w) - Complex(0.0, -0.5)) < 1e-14);
}

TEST_CASE("stability verdicts") {
  const auto neg = -1.0 * PhasorArray::eye(2);
  const auto v = isStable(neg, 3, 1.0);
  CHECK(v.stable);
  CHECK(std::abs(v.worst - Complex(-1.0, 0.0)) < 1e-12);
  CHECK_FALSE(isStable(neg, 3, 1.0, 1.5).stable);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(floquetExponents(PhasorArray::zeros(2, 3), 2, 1.0), ValidationError);
  CHECK_THROWS_AS(floquetExponents(PhasorArray::eye(2), -1, 1.0), ValidationError);
  CHECK_THROWS_AS(floquetExponents(PhasorArray::eye(2), 2, 0.0), ValidationError);
}
