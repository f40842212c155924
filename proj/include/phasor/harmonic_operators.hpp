#pragma once

#include <ostream>
#include <vector>

#include <json.hpp>

#include "phasor/phasor_array.hpp"

namespace phasor {

enum class OperatorKind { toeplitzBlock, fourierColumn, diagonal, general };

const char* toString(OperatorKind kind);

/// Dense truncated harmonic operator. Rows are grouped per time-domain row i
/// into 2h+1 harmonic rows (k = -h..h), likewise columns for
/// toeplitzBlock/diagonal kinds; fourierColumn has m plain columns.
struct ToeplitzBlockMatrix {
  Index n = 0;
  Index m = 0;
  int h = 0;
  OperatorKind kind = OperatorKind::general;
  Matrix data;

  Index blockSize() const { return 2 * h + 1; }
  /// Row of harmonic k inside block row i.
  Index row(Index i, int k) const { return i * blockSize() + (k + h); }
  Index col(Index j, int k) const { return j * blockSize() + (k + h); }
};

/// Truncated T(A)_h: entry (p, q) of block (i, j) is A_{p-q}(i, j), so
/// positive harmonics fill subdiagonals.
ToeplitzBlockMatrix toeplitzBlock(const PhasorArray& a, int h);

/// Truncated F(A)_h: the (2h+1)n x m stack of phasors k = -h..h per row.
ToeplitzBlockMatrix fourierColumn(const PhasorArray& a, int h);

/// N = I_n (x) diag(j k w), k = -h..h.
ToeplitzBlockMatrix nOperator(Index n, int h, double period);

/// T(A)_h - N for square A.
Matrix harmonicStateMatrix(const PhasorArray& a, int h, double period);

struct CentralPhasors {
  PhasorArray phasors;
  /// Largest deviation of a window entry from its diagonal mean.
  double defect = 0.0;
};

/// Recovers phasors |k| <= hOut from an (approximately) Toeplitz-block
/// matrix by averaging each block diagonal over the central harmonic
/// window |p|, |q| <= radius. radius < 0 selects hOut; it is clamped
/// to [ceil(hOut / 2), h] so every offset keeps at least one entry.
CentralPhasors extractCentralPhasors(const ToeplitzBlockMatrix& mat, int hOut,
                                     int radius = -1);

/// Phasor vector (one column of a Fourier stack) back to an n x 1 array.
PhasorArray phasorsFromColumn(const Vector& column, Index n, int h);

/// |M| with entries below `floor` zeroed.
RealMatrix magnitudeGrid(const Matrix& mat, double floor = 1e-3);
void writeCsv(std::ostream& out, const RealMatrix& grid);

/// Index maps between Toeplitz-block ordering (harmonics inner) and
/// block-Toeplitz ordering (matrix entries inner): M_bt = M_tb(rows, cols).
struct BlockPermutation {
  std::vector<Index> rows;
  std::vector<Index> cols;
};
BlockPermutation tbToBt(Index n, Index m, int h);
Matrix permute(const Matrix& mat, const BlockPermutation& perm);

/// Largest deviation from Toeplitz structure inside every block.
double toeplitzDefect(const ToeplitzBlockMatrix& mat);

nlohmann::json toJson(const ToeplitzBlockMatrix& mat);

}  // namespace phasor
