#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "phasor/dense_solvers.hpp"

using namespace phasor;

namespace {

Matrix randomComplex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

Matrix shiftedStable(Index n, std::mt19937_64& rng) {
  return randomComplex(n, n, rng) - 4.0 * static_cast<double>(n) * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("Sylvester kernel against the Kronecker oracle") {
  std::mt19937_64 rng(43);
  for (Index n : {1, 3, 7}) {
    for (Index m : {1, 2, 6}) {
      const Matrix a = shiftedStable(n, rng);
      const Matrix b = shiftedStable(m, rng);
      const Matrix c = randomComplex(n, m, rng);
      const Matrix x = dense::solveSylvester(a, b, c);
      // the oracle solves A X + X B + C = 0
      const Matrix ref = oracle::kronSylvester(a, b, -c);
      CHECK(testing::maxAbs(x - ref) < 1e-12 * (1.0 + testing::maxAbs(ref)));
      CHECK(testing::maxAbs(a * x + x * b - c) < 1e-11);
    }
  }
}

TEST_CASE("Lyapunov kernel against the Kronecker oracle") {
  std::mt19937_64 rng(47);
  for (Index n : {1, 2, 5, 9}) {
    const Matrix m = shiftedStable(n, rng);
    const Matrix g = randomComplex(n, n, rng);
    const Matrix c = g + g.adjoint();
    const Matrix x = dense::solveLyapunov(m, c);
    const Matrix ref = oracle::kronLyapunov(m, -c);
    CHECK(testing::maxAbs(x - ref) < 1e-12 * (1.0 + testing::maxAbs(ref)));
    CHECK(testing::maxAbs(x - x.adjoint()) < 1e-12);
  }
}

TEST_CASE("scalar cases") {
  const Matrix a = Matrix::Constant(1, 1, -1.0);
  CHECK(std::abs(dense::solveLyapunov(a, Matrix::Constant(1, 1, -1.0))(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(dense::solveSylvester(a, Matrix::Constant(1, 1, -2.0),
                                       Matrix::Constant(1, 1, -3.0))(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("spectral overlap is reported") {
  const Matrix a = Matrix::Constant(1, 1, 1.0);
  const Matrix b = Matrix::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(dense::solveSylvester(a, b, Matrix::Ones(1, 1)), NumericalError);
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK_THROWS_AS(dense::solveLyapunov(rot, Matrix::Identity(2, 2)), NumericalError);
  CHECK_THROWS_AS(dense::solveSylvester(a, b, Matrix::Ones(2, 1)), ValidationError);
}
