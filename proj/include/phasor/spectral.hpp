#pragma once

#include <string>
#include <vector>

#include "phasor/phasor_array.hpp"

namespace phasor {

enum class FloquetMode { fundamental, all };

struct FloquetResult {
  /// One representative exponent per state, Im folded into (-w/2, w/2].
  std::vector<Complex> fundamental;
  /// Central-harmonic energy fraction of each fundamental eigenvector.
  std::vector<double> concentration;
  /// Full spectrum of the truncated harmonic state matrix.
  std::vector<Complex> allEigen;
  int h = 0;
  std::vector<std::string> warnings;
};

/// Folds an exponent into the fundamental strip Im in (-w/2, w/2].
Complex foldToStrip(Complex lambda, double omega);

/// Floquet exponents from the spectrum of T(A)_h - N. `fundamental` mode
/// selects n representatives by eigenvector concentration on the k = 0
/// block; `all` mode skips the eigenvectors and leaves fundamental empty.
FloquetResult floquetExponents(const PhasorArray& a, int h, double period,
                               FloquetMode mode = FloquetMode::fundamental);

struct StabilityVerdict {
  bool stable = false;
  /// Fundamental exponent with the largest real part.
  Complex worst;
  FloquetResult floquet;
};

/// Stable iff every fundamental exponent has real part < -margin.
StabilityVerdict isStable(const PhasorArray& a, int h, double period, double margin = 0.0);

}  // namespace phasor
