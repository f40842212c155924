#include "phasor/harmonic_operators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

namespace phasor {

const char* toString(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::toeplitzBlock: return "toeplitzBlock";
    case OperatorKind::fourierColumn: return "fourierColumn";
    case OperatorKind::diagonal: return "diagonal";
    case OperatorKind::general: return "general";
  }
  return "general";
}

ToeplitzBlockMatrix toeplitzBlock(const PhasorArray& a, int h) {
  if (h < 0) throw ValidationError("toeplitzBlock: order must be non-negative");
  ToeplitzBlockMatrix out{a.rows(), a.cols(), h, OperatorKind::toeplitzBlock, {}};
  const Index b = out.blockSize();
  out.data = Matrix::Zero(a.rows() * b, a.cols() * b);
  const int reach = std::min(a.order(), 2 * h);
  for (int d = -reach; d <= reach; ++d) {
    const auto s = a.slice(d);
    for (Index j = 0; j < a.cols(); ++j) {
      for (Index i = 0; i < a.rows(); ++i) {
        const Complex v = s(i, j);
        if (v == Complex(0.0, 0.0)) continue;
        for (int p = std::max(-h, d - h); p <= std::min(h, d + h); ++p) {
          out.data(out.row(i, p), out.col(j, p - d)) = v;
        }
      }
    }
  }
  return out;
}

ToeplitzBlockMatrix fourierColumn(const PhasorArray& a, int h) {
  if (h < 0) throw ValidationError("fourierColumn: order must be non-negative");
  ToeplitzBlockMatrix out{a.rows(), a.cols(), h, OperatorKind::fourierColumn, {}};
  out.data = Matrix::Zero(a.rows() * out.blockSize(), a.cols());
  for (int k = -std::min(h, a.order()); k <= std::min(h, a.order()); ++k) {
    const auto s = a.slice(k);
    for (Index i = 0; i < a.rows(); ++i) out.data.row(out.row(i, k)) = s.row(i);
  }
  return out;
}

ToeplitzBlockMatrix nOperator(Index n, int h, double period) {
  if (n < 1 || h < 0) throw ValidationError("nOperator: invalid dimensions");
  if (!(period > 0.0)) throw ValidationError("nOperator: period must be positive");
  const double w = 2.0 * std::numbers::pi / period;
  ToeplitzBlockMatrix out{n, n, h, OperatorKind::diagonal, {}};
  out.data = Matrix::Zero(n * out.blockSize(), n * out.blockSize());
  for (Index i = 0; i < n; ++i) {
    for (int k = -h; k <= h; ++k) out.data(out.row(i, k), out.row(i, k)) = Complex(0.0, w * k);
  }
  return out;
}

Matrix harmonicStateMatrix(const PhasorArray& a, int h, double period) {
  if (a.rows() != a.cols()) throw ValidationError("harmonicStateMatrix: A must be square");
  Matrix m = toeplitzBlock(a, h).data;
  m -= nOperator(a.rows(), h, period).data;
  return m;
}

CentralPhasors extractCentralPhasors(const ToeplitzBlockMatrix& mat, int hOut, int radius) {
  if (hOut < 0 || hOut > mat.h) throw ValidationError("extractCentralPhasors: hOut must lie in [0, h]");
  if (mat.data.rows() != mat.n * mat.blockSize() || mat.data.cols() != mat.m * mat.blockSize()) {
    throw ValidationError("extractCentralPhasors: matrix does not match its block metadata");
  }
  const int h = mat.h;
  int r = radius < 0 ? hOut : radius;
  r = std::clamp(r, (hOut + 1) / 2, h);
  double defect = 0.0;
  std::vector<Matrix> slices(static_cast<std::size_t>(2 * hOut + 1), Matrix::Zero(mat.n, mat.m));
  for (Index i = 0; i < mat.n; ++i) {
    for (Index j = 0; j < mat.m; ++j) {
      for (int k = -hOut; k <= hOut; ++k) {
        const int lo = std::max(-r, k - r);
        const int hi = std::min(r, k + r);
        Complex sum = 0.0;
        for (int p = lo; p <= hi; ++p) sum += mat.data(mat.row(i, p), mat.col(j, p - k));
        const Complex mean = sum / static_cast<double>(hi - lo + 1);
        for (int p = lo; p <= hi; ++p) {
          defect = std::max(defect, std::abs(mat.data(mat.row(i, p), mat.col(j, p - k)) - mean));
        }
        slices[k + hOut](i, j) = mean;
      }
    }
  }
  return {PhasorArray::fromSlices(slices, SliceMode::full).asComplex(), defect};
}

PhasorArray phasorsFromColumn(const Vector& column, Index n, int h) {
  if (column.size() != n * (2 * h + 1)) throw ValidationError("phasorsFromColumn: size mismatch");
  return PhasorArray::generate(n, 1, h, false, [&](int k) {
    Matrix s(n, 1);
    for (Index i = 0; i < n; ++i) s(i, 0) = column(i * (2 * h + 1) + k + h);
    return s;
  });
}

RealMatrix magnitudeGrid(const Matrix& mat, double floor) {
  RealMatrix g = mat.cwiseAbs();
  return (g.array() < floor).select(0.0, g);
}

void writeCsv(std::ostream& out, const RealMatrix& grid) {
  out << std::setprecision(17);
  for (Index i = 0; i < grid.rows(); ++i) {
    for (Index j = 0; j < grid.cols(); ++j) {
      if (j > 0) out << ',';
      out << grid(i, j);
    }
    out << '\n';
  }
}

BlockPermutation tbToBt(Index n, Index m, int h) {
  const Index b = 2 * h + 1;
  BlockPermutation perm;
  perm.rows.resize(static_cast<std::size_t>(n * b));
  perm.cols.resize(static_cast<std::size_t>(m * b));
  for (Index k = 0; k < b; ++k) {
    for (Index i = 0; i < n; ++i) perm.rows[k * n + i] = i * b + k;
    for (Index j = 0; j < m; ++j) perm.cols[k * m + j] = j * b + k;
  }
  return perm;
}

Matrix permute(const Matrix& mat, const BlockPermutation& perm) {
  if (mat.rows() != static_cast<Index>(perm.rows.size()) ||
      mat.cols() != static_cast<Index>(perm.cols.size())) {
    throw ValidationError("permute: permutation does not match matrix size");
  }
  Matrix out(mat.rows(), mat.cols());
  for (Index r = 0; r < mat.rows(); ++r) {
    for (Index c = 0; c < mat.cols(); ++c) out(r, c) = mat(perm.rows[r], perm.cols[c]);
  }
  return out;
}

double toeplitzDefect(const ToeplitzBlockMatrix& mat) {
  const int h = mat.h;
  double defect = 0.0;
  for (Index i = 0; i < mat.n; ++i) {
    for (Index j = 0; j < mat.m; ++j) {
      for (int d = -2 * h; d <= 2 * h; ++d) {
        const int lo = std::max(-h, d - h);
        const Complex ref = mat.data(mat.row(i, lo), mat.col(j, lo - d));
        for (int p = lo + 1; p <= std::min(h, d + h); ++p) {
          defect = std::max(defect, std::abs(mat.data(mat.row(i, p), mat.col(j, p - d)) - ref));
        }
      }
    }
  }
  return defect;
}

nlohmann::json toJson(const ToeplitzBlockMatrix& mat) {
  nlohmann::json entries = nlohmann::json::array();
  for (Index r = 0; r < mat.data.rows(); ++r) {
    for (Index c = 0; c < mat.data.cols(); ++c) {
      entries.push_back({mat.data(r, c).real(), mat.data(r, c).imag()});
    }
  }
  return {{"kind", toString(mat.kind)}, {"n", mat.n}, {"m", mat.m}, {"h", mat.h},
          {"rows", mat.data.rows()}, {"cols", mat.data.cols()}, {"data", std::move(entries)}};
}

}  // namespace phasor
