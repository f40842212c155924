#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "phasor/fixtures.hpp"
#include "phasor/harmonic_operators.hpp"

using namespace phasor;
using testing::maxAbs;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("scalar Toeplitz layout") {
  const auto a = testing::scalarPhasors({Complex(1, 1), Complex(2, 0), Complex(3, -1)});
  const auto t = toeplitzBlock(a, 1);
  CHECK((t.kind == OperatorKind::toeplitzBlock));
  Matrix expected(3, 3);
  const Complex am1(1, 1), a0(2, 0), a1(3, -1);
  expected << a0, am1, 0, a1, a0, am1, 0, a1, a0;
  CHECK(maxAbs(t.data - expected) == 0.0);
}

TEST_CASE("Toeplitz lift basics") {
  CHECK(maxAbs(toeplitzBlock(PhasorArray::eye(3), 4).data - Matrix::Identity(27, 27)) == 0.0);
  const auto a = fixtures::benchmarkPhasors();
  const auto t = toeplitzBlock(a, 8);
  CHECK(t.data.rows() == 34);
  CHECK(t.data.cols() == 34);
  CHECK(toeplitzDefect(t) == 0.0);
  // entry (p, q) of block (i, j) is a_{p-q}
  CHECK(t.data(t.row(1, 3), t.col(0, 1)) == a.coeff(1, 0, 2));
  CHECK(t.data(t.row(0, -8), t.col(1, 8)) == a.coeff(0, 1, -16));
  CHECK_THROWS_AS(toeplitzBlock(a, -1), ValidationError);

  const auto grid = magnitudeGrid(t.data);
  CHECK(grid.rows() == 34);
  CHECK(grid.cols() == 34);
  // the (1,2) block only carries k in {-1, 0, 1}
  for (int p = -8; p <= 8; ++p) {
    for (int q = -8; q <= 8; ++q) {
      const bool band = std::abs(p - q) <= 1;
      CHECK((grid(t.row(0, p), t.col(1, q)) > 0.0) == band);
    }
  }
}

TEST_CASE("Toeplitz lift properties") {
  std::mt19937_64 rng(29);
  const auto a = Complex(0.4, 0.9) * PhasorArray::random(2, 3, 4, rng);
  const auto b = PhasorArray::random(2, 3, 6, rng);
  const Matrix sum = toeplitzBlock(a, 5).data + toeplitzBlock(b, 5).data;
  CHECK(maxAbs(toeplitzBlock(a + b, 5).data - sum) == 0.0);
  CHECK(maxAbs(toeplitzBlock(a.hermitian(), 5).data - toeplitzBlock(a, 5).data.adjoint()) == 0.0);
  const auto n = nOperator(3, 4, 0.7);
  CHECK(maxAbs(n.data + n.data.adjoint()) == 0.0);
}

TEST_CASE("product consistency in the central window") {
  std::mt19937_64 rng(31);
  const int hA = 3;
  const int hB = 2;
  const int h = 5;
  const auto a = PhasorArray::random(2, 2, hA, rng);
  const auto b = PhasorArray::random(2, 2, hB, rng);
  const auto ab = a * b;
  SUBCASE("truncated lifts do not commute with the product") {
    const Matrix lhs = toeplitzBlock(ab, h).data;
    const Matrix rhs = toeplitzBlock(a, h).data * toeplitzBlock(b, h).data;
    CHECK(maxAbs(lhs - rhs) > 1e-6);
  }
  SUBCASE("central rows agree once the order is inflated") {
    for (int bigH : {h + hA + hB, h + hA + hB + 3}) {
      const auto ta = toeplitzBlock(a, bigH);
      const auto tb = toeplitzBlock(b, bigH);
      const Matrix prod = ta.data * tb.data;
      const auto tab = toeplitzBlock(ab, bigH);
      double worst = 0.0;
      for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) {
          for (int p = -h; p <= h; ++p) {
            for (int q = -h; q <= h; ++q) {
              worst = std::max(worst, std::abs(prod(ta.row(i, p), tb.col(j, q)) -
                                               tab.data(tab.row(i, p), tab.col(j, q))));
            }
          }
        }
      }
      CHECK(worst < 1e-12);
    }
  }
  SUBCASE("lift times Fourier column") {
    const auto x = PhasorArray::random(2, 1, 4, rng);
    const int hh = 9;
    const Matrix lhs = toeplitzBlock(a, hh).data * fourierColumn(x, hh).data;
    const auto col = fourierColumn(a * x, hh);
    for (Index i = 0; i < 2; ++i) {
      for (int k = -(hh - hA); k <= hh - hA; ++k) {
        CHECK(std::abs(lhs(col.row(i, k), 0) - col.data(col.row(i, k), 0)) < 1e-13);
      }
    }
  }
}

TEST_CASE("Fourier column") {
  const auto c = fourierColumn(testing::realConstant({{1, 2}, {3, 4}}), 1);
  CHECK((c.kind == OperatorKind::fourierColumn));
  CHECK(c.data.rows() == 6);
  CHECK(c.data.cols() == 2);
  // rows ordered entry-major, harmonics inner
  CHECK(c.data(c.row(0, 0), 1) == Complex(2.0));
  CHECK(c.data(c.row(1, 0), 0) == Complex(3.0));
  CHECK(c.data(c.row(0, 1), 0) == Complex(0.0));
  CHECK(c.data(c.row(1, -1), 1) == Complex(0.0));

  const auto cosCol = fourierColumn(PhasorArray::cos(), 2);
  Vector expected(5);
  expected << 0, 0.5, 0, 0.5, 0;
  CHECK(maxAbs(cosCol.data - expected) == 0.0);

  const auto back = phasorsFromColumn(fourierColumn(PhasorArray::sin(), 3).data.col(0), 1, 3);
  CHECK(maxDifference(back, PhasorArray::sin()) == 0.0);
}

TEST_CASE("N operator") {
  const auto n1 = nOperator(1, 1, 2 * pi);
  CHECK((n1.kind == OperatorKind::diagonal));
  CHECK(std::abs(n1.data(0, 0) - Complex(0, -1)) < 1e-15);
  CHECK(n1.data(1, 1) == Complex(0.0));
  CHECK(std::abs(n1.data(2, 2) - Complex(0, 1)) < 1e-15);
  CHECK(maxAbs(nOperator(2, 0, 3.0).data) == 0.0);
  const auto n2 = nOperator(1, 2, 1.0);
  for (int k = -2; k <= 2; ++k) CHECK(std::abs(n2.data(k + 2, k + 2) - Complex(0, 2 * pi * k)) < 1e-14);
  CHECK(maxAbs(n2.data - Matrix(n2.data.diagonal().asDiagonal())) == 0.0);
  CHECK_THROWS_AS(nOperator(1, 1, 0.0), ValidationError);
}

TEST_CASE("harmonic state matrix") {
  const auto a = testing::scalar(-0.7);
  CHECK(maxAbs(harmonicStateMatrix(a, 0, 1.0) - Matrix::Constant(1, 1, -0.7)) == 0.0);
  const Matrix m = harmonicStateMatrix(a, 1, 2 * pi);
  CHECK(std::abs(m(0, 0) - Complex(-0.7, 1)) < 1e-15);
  CHECK(std::abs(m(1, 1) - Complex(-0.7, 0)) < 1e-15);
  CHECK(std::abs(m(2, 2) - Complex(-0.7, -1)) < 1e-15);
  CHECK_THROWS_AS(harmonicStateMatrix(PhasorArray::zeros(2, 3), 1, 1.0), ValidationError);

  // LTI spectrum replicated along j w Z
  const auto lti = testing::realConstant({{-1, 2}, {0, -3}});
  Eigen::ComplexEigenSolver<Matrix> eig(harmonicStateMatrix(lti, 2, 1.0));
  int matched = 0;
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    for (double base : {-1.0, -3.0}) {
      for (int k = -2; k <= 2; ++k) {
        if (std::abs(eig.eigenvalues()(i) - Complex(base, 2 * pi * k)) < 1e-10) ++matched;
      }
    }
  }
  CHECK(matched == 10);
}

TEST_CASE("central phasor extraction") {
  std::mt19937_64 rng(37);
  const auto a = Complex(0.2, 1.1) * PhasorArray::random(2, 3, 3, rng);
  SUBCASE("roundtrip") {
    const auto got = extractCentralPhasors(toeplitzBlock(a, 6), 3);
    CHECK(got.defect < 1e-14);
    CHECK(maxDifference(got.phasors, a) < 1e-14);
  }
  SUBCASE("zero matrix") {
    const ToeplitzBlockMatrix z{2, 2, 3, OperatorKind::general, Matrix::Zero(14, 14)};
    const auto got = extractCentralPhasors(z, 2);
    CHECK(got.phasors.maxMagnitude() == 0.0);
    CHECK(got.defect < 1e-14);
  }
  SUBCASE("corrupted corner") {
    auto t = toeplitzBlock(a, 6);
    t.data(t.row(1, 6), t.col(2, 6)) += 0.5;
    const auto small = extractCentralPhasors(t, 2);
    CHECK(small.defect < 1e-14);
    CHECK(maxDifference(small.phasors, a.trunc(2)) < 1e-14);
    const auto large = extractCentralPhasors(t, 6);
    CHECK(large.defect > 0.1);
  }
  CHECK_THROWS_AS(extractCentralPhasors(toeplitzBlock(a, 2), 3), ValidationError);
}

TEST_CASE("magnitude grid and CSV") {
  CHECK(magnitudeGrid(Matrix::Identity(3, 3)).isApprox(RealMatrix::Identity(3, 3)));
  CHECK(magnitudeGrid(Matrix::Zero(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  Matrix m(1, 3);
  m << Complex(3, 4), 5e-4, -0.25;
  const auto g = magnitudeGrid(m);
  std::ostringstream out;
  writeCsv(out, g);
  CHECK(out.str() == "5,0,0.25\n");
}

TEST_CASE("Toeplitz-block to block-Toeplitz permutation") {
  std::mt19937_64 rng(41);
  const auto a = PhasorArray::random(2, 3, 2, rng);
  const int h = 2;
  const auto t = toeplitzBlock(a, h);
  const Matrix bt = permute(t.data, tbToBt(2, 3, h));
  // block (p, q) of the block-Toeplitz form is the full slice a_{p-q}
  for (int p = -h; p <= h; ++p) {
    for (int q = -h; q <= h; ++q) {
      CHECK(maxAbs(bt.block((p + h) * 2, (q + h) * 3, 2, 3) - a.sliceOrZero(p - q)) == 0.0);
    }
  }
  CHECK_THROWS_AS(permute(t.data, tbToBt(3, 2, h)), ValidationError);
}

TEST_CASE("operator JSON dump carries its kind") {
  const auto doc = toJson(nOperator(1, 1, 1.0));
  CHECK(doc["kind"].get<std::string>() == "diagonal");
  CHECK(doc["rows"].get<int>() == 3);
  CHECK(doc["data"].size() == 9);
}
