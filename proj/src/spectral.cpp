#include "phasor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "phasor/harmonic_operators.hpp"

namespace phasor {

Complex foldToStrip(Complex lambda, double omega) {
  // Smallest integer shift putting Im in (-w/2, w/2].
  const double shift = std::ceil(lambda.imag() / omega - 0.5);
  return {lambda.real(), lambda.imag() - shift * omega};
}

FloquetResult floquetExponents(const PhasorArray& a, int h, double period, FloquetMode mode) {
  if (a.rows() != a.cols()) throw ValidationError("floquetExponents: A must be square");
  if (h < 0) throw ValidationError("floquetExponents: order must be non-negative");
  const double omega = 2.0 * std::numbers::pi / period;
  const Matrix m = harmonicStateMatrix(a, h, period);

  FloquetResult result;
  result.h = h;
  if (h < 2 * a.order()) {
    std::ostringstream msg;
    msg << "truncation order " << h << " is below twice the input order " << a.order();
    result.warnings.push_back(msg.str());
  }

  const bool vectors = mode == FloquetMode::fundamental;
  Eigen::ComplexEigenSolver<Matrix> eig(m, vectors);
  if (eig.info() != Eigen::Success) throw NumericalError("floquetExponents: eigensolver failed");
  const Vector& values = eig.eigenvalues();
  result.allEigen.assign(values.data(), values.data() + values.size());
  if (!vectors) return result;

  const Index n = a.rows();
  const Index block = 2 * h + 1;
  std::vector<double> conc(static_cast<std::size_t>(values.size()));
  std::vector<Complex> folded(conc.size());
  for (Index e = 0; e < values.size(); ++e) {
    const auto v = eig.eigenvectors().col(e);
    double central = 0.0;
    for (Index i = 0; i < n; ++i) central += std::norm(v(i * block + h));
    conc[e] = central / v.squaredNorm();
    folded[e] = foldToStrip(values(e), omega);
  }

  std::vector<Index> order(conc.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    if (std::abs(conc[x] - conc[y]) > 1e-9) return conc[x] > conc[y];
    return std::abs(folded[x].imag()) < std::abs(folded[y].imag());
  });

  std::vector<Index> picked;
  for (Index e : order) {
    if (static_cast<Index>(picked.size()) == n) break;
    // A harmonic copy of an already chosen exponent folds onto it while
    // carrying clearly less central energy.
    const bool copy = std::any_of(picked.begin(), picked.end(), [&](Index p) {
      const double tol = 1e-4 * (omega + std::abs(folded[p]));
      return std::abs(folded[e] - folded[p]) < tol && conc[e] < 0.5 * conc[p];
    });
    if (!copy) picked.push_back(e);
  }
  for (Index e : picked) {
    result.fundamental.push_back(folded[e]);
    result.concentration.push_back(conc[e]);
  }
  return result;
}

StabilityVerdict isStable(const PhasorArray& a, int h, double period, double margin) {
  StabilityVerdict verdict;
  verdict.floquet = floquetExponents(a, h, period, FloquetMode::fundamental);
  const auto& f = verdict.floquet.fundamental;
  if (f.empty()) throw NumericalError("isStable: no fundamental exponents found");
  verdict.worst = *std::max_element(f.begin(), f.end(), [](Complex x, Complex y) {
    return x.real() < y.real();
  });
  verdict.stable = verdict.worst.real() < -margin;
  return verdict;
}

}  // namespace phasor
