#include "qfp/device.hpp"

#include <stdexcept>
#include <string>

namespace qfp {

void ModulatorSpec::validate() const {
  if (!(theta >= 0.0))
    throw std::invalid_argument("ModulatorSpec: theta must be >= 0 (a negative index is a sign flip)");
  if (theta > kThetaEnvelope)
    throw std::domain_error("ModulatorSpec: theta outside the design envelope [0, 20] rad");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("ModulatorSpec: sign must be +1 or -1");
}

ShaperSpec ShaperSpec::step_phase(int channels, double alpha, double bin_spacing_ghz) {
  ShaperSpec s;
  s.channel_count = channels;
  s.bin_spacing_ghz = bin_spacing_ghz;
  if (channels > 0) {
    s.amplitudes = Eigen::ArrayXd::Ones(channels);
    s.phases = Eigen::ArrayXd::Zero(channels);
    for (int k = s.k_min(); k <= s.k_max(); ++k)
      if (k >= 1) s.phases[k - s.k_min()] = alpha;
  }
  s.validate();
  return s;
}

std::complex<double> ShaperSpec::transmission(int k) const {
  if (!in_band(k)) return {0.0, 0.0};
  const int i = k - k_min();
  return std::polar(amplitudes[i], phases[i]);
}

void ShaperSpec::validate() const {
  if (channel_count < 2 || channel_count % 2 != 0)
    throw std::invalid_argument("ShaperSpec: channel_count must be an even integer >= 2, got " +
                                std::to_string(channel_count));
  if (amplitudes.size() != channel_count || phases.size() != channel_count)
    throw std::invalid_argument("ShaperSpec: amplitudes and phases must have one entry per channel");
  if ((amplitudes < 0.0).any() || (amplitudes > 1.0).any())
    throw std::invalid_argument("ShaperSpec: amplitudes must lie in [0, 1]");
  if (!(bin_spacing_ghz > 0.0))
    throw std::invalid_argument("ShaperSpec: bin_spacing_ghz must be positive");
}

}  // namespace qfp
