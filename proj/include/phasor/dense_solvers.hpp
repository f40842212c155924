#pragma once

#include "phasor/phasor_array.hpp"

namespace phasor::dense {

/// Solves A X + X B = C (Bartels-Stewart on complex Schur forms).
/// Throws NumericalError when the spectra of A and -B (nearly) intersect.
Matrix solveSylvester(const Matrix& a, const Matrix& b, const Matrix& c);

/// Solves M^* X + X M = C with a single Schur decomposition of M.
Matrix solveLyapunov(const Matrix& m, const Matrix& c);

}  // namespace phasor::dense
