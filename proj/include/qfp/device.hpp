#pragma once

#include "qfp/bessel.hpp"

#include <Eigen/Core>

#include <complex>

namespace qfp {

/// Sinusoidally driven phase modulator. theta is the modulation index in
/// radians; sign is the drive parity (+1 and -1 drives are exactly out of
/// phase with each other). A negative index is equivalent to flipping sign.
struct ModulatorSpec {
  double theta = 0.0;
  int sign = +1;

  void validate() const;
};

/// Line-by-line spectral filter with an even number of contiguous channels
/// k in [-B/2+1, B/2], each with amplitude transmission in [0, 1] and a
/// phase in radians. Out-of-band transmission is identically zero.
/// bin_spacing_ghz is reporting metadata; the discrete model does not use it.
struct ShaperSpec {
  int channel_count = 0;
  Eigen::ArrayXd amplitudes;
  Eigen::ArrayXd phases;
  double bin_spacing_ghz = 3.0;

  /// Canonical pattern: unit amplitudes, phase 0 for k <= 0 and alpha for k >= 1.
  static ShaperSpec step_phase(int channels, double alpha, double bin_spacing_ghz = 3.0);

  int k_min() const { return -channel_count / 2 + 1; }
  int k_max() const { return channel_count / 2; }
  bool in_band(int k) const { return k >= k_min() && k <= k_max(); }
  std::complex<double> transmission(int k) const;

  void validate() const;
};

}  // namespace qfp
