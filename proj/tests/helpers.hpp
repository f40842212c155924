#pragma once

#include <random>
#include <vector>

#include "phasor/phasor_array.hpp"

namespace testing {

inline phasor::PhasorArray scalar(double v) {
  return phasor::PhasorArray::constant(phasor::RealMatrix(phasor::RealMatrix::Constant(1, 1, v)));
}

inline phasor::PhasorArray realConstant(std::initializer_list<std::initializer_list<double>> rows) {
  phasor::RealMatrix m(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return phasor::PhasorArray::constant(m);
}

/// Scalar phasors listed k = -h..h.
inline phasor::PhasorArray scalarPhasors(std::vector<phasor::Complex> coeffs) {
  const int h = static_cast<int>(coeffs.size() / 2);
  return phasor::PhasorArray(1, 1, h, std::move(coeffs));
}

inline std::vector<double> uniformTimes(double t0, double t1, int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (count - 1);
  return t;
}

inline double maxAbs(const phasor::Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
