#include "phasor/dense_solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#ifdef PHASOR_HAVE_LAPACKE
#include <complex>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace phasor::dense {
namespace {

struct Schur {
  Matrix t;  // upper triangular
  Matrix u;  // unitary, M = U T U^*
};

void checkSeparation(Complex pivot, double scale, Index j) {
  if (std::abs(pivot) <= 1e3 * std::numeric_limits<double>::epsilon() * scale) {
    std::ostringstream msg;
    msg << "Sylvester operator is singular: spectra overlap (column " << j << ")";
    throw NumericalError(msg.str());
  }
}

Schur schurOf(const Matrix& m) {
#ifdef PHASOR_HAVE_LAPACKE
  Schur s{m, Matrix(m.rows(), m.cols())};
  const auto n = static_cast<lapack_int>(m.rows());
  lapack_int sdim = 0;
  Vector w(m.rows());
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, s.t.data(), n,
                                        &sdim, w.data(), s.u.data(), n);
  if (info != 0) throw NumericalError("complex Schur decomposition failed");
  s.t.triangularView<Eigen::StrictlyLower>().setZero();
  return s;
#else
  Eigen::ComplexSchur<Matrix> schur(m);
  if (schur.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
  return {schur.matrixT(), schur.matrixU()};
#endif
}

}  // namespace

Matrix solveSylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || c.rows() != a.rows() ||
      c.cols() != b.rows()) {
    throw ValidationError("solveSylvester: non-conformable operands");
  }
  const auto sa = schurOf(a);
  const auto sb = schurOf(b);
  const Matrix& ta = sa.t;
  const Matrix& tb = sb.t;
  const Matrix rhs = sa.u.adjoint() * c * sb.u;
  const double scale = std::max(ta.cwiseAbs().maxCoeff(), tb.cwiseAbs().maxCoeff()) + 1.0;

  // Column j: (Ta + Tb(j,j) I) y_j = rhs_j - sum_{k<j} Tb(k,j) y_k.
  Matrix y(c.rows(), c.cols());
  Matrix shifted = ta;
  const Vector diag = ta.diagonal();
  for (Index j = 0; j < c.cols(); ++j) {
    Vector col = rhs.col(j);
    if (j > 0) col.noalias() -= y.leftCols(j) * tb.col(j).head(j);
    shifted.diagonal() = diag.array() + tb(j, j);
    for (Index i = 0; i < shifted.rows(); ++i) checkSeparation(shifted(i, i), scale, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(col);
  }
  return sa.u * y * sb.u.adjoint();
}

Matrix solveLyapunov(const Matrix& m, const Matrix& c) {
  if (m.rows() != m.cols() || c.rows() != m.rows() || c.cols() != m.cols()) {
    throw ValidationError("solveLyapunov: non-conformable operands");
  }
  // M = U T U^*  =>  T^* Y + Y T = U^* C U with X = U Y U^*.
  const auto s = schurOf(m);
  const Matrix& t = s.t;
  const Matrix& u = s.u;
  const Matrix rhs = u.adjoint() * c * u;
  const double scale = t.cwiseAbs().maxCoeff() + 1.0;

  Matrix lower = t.adjoint();
  const Vector diag = lower.diagonal();
  Matrix y(c.rows(), c.cols());
  for (Index j = 0; j < c.cols(); ++j) {
    Vector col = rhs.col(j);
    if (j > 0) col.noalias() -= y.leftCols(j) * t.col(j).head(j);
    lower.diagonal() = diag.array() + t(j, j);
    for (Index i = 0; i < lower.rows(); ++i) checkSeparation(lower(i, i), scale, j);
    y.col(j) = lower.triangularView<Eigen::Lower>().solve(col);
  }
  return u * y * u.adjoint();
}

}  // namespace phasor::dense
