#pragma once

#include "qfp/transfer.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qfp {

/// Raised when the dual-line fringes are too flat to identify a phase.
struct ReconstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Settings for the synthetic coherent-state characterization run.
struct ProbeConfig {
  int replicates = 5;
  double loss = 1.0;          // frequency-independent power prefactor L^2, L in (0, 1]
  double sigma = 0.0;         // relative intensity noise per bin per replicate
  double sigma_common = 0.0;  // shared per-spectrum power fluctuation (cancels in normalization)
  std::vector<double> phase_grid;  // phi_s values; empty selects 16 uniform points on [0, 2pi)
  double phi_i = 0.0;              // hidden instrument phase (simulator ground truth)
  std::uint64_t rng_seed = 0;

  static std::vector<double> uniform_grid(int points);
  std::vector<double> resolved_grid() const;
  void validate() const;
};

/// Normalized single-line spectra: powers(n) is replicates x window bins for
/// input bin n; each row sums to 1. totals are the raw normalization divisors.
struct SingleLineData {
  int m_min = 0;
  int m_max = 0;
  std::array<Eigen::MatrixXd, 2> powers;
  std::array<Eigen::VectorXd, 2> totals;
};

/// Normalized dual-line powers in bins 0 and 1 per (replicate, phase point).
struct DualLineData {
  std::vector<double> phase_grid;
  Eigen::MatrixXd rho0;
  Eigen::MatrixXd rho1;
  Eigen::MatrixXd totals;
};

struct ProbeDataset {
  int replicates = 0;
  SingleLineData single_line;
  DualLineData dual_line;
};

/// Phase-reference decomposition of a 2x2 gate: magnitudes r_mn plus the
/// gauge-invariant phase phi11 = arg W00 + arg W11 - arg W01 - arg W10.
/// input_phases are the column phases that zero the first row and column.
struct GaugeDecomposition {
  Eigen::Matrix2d magnitudes;
  double phi11 = 0.0;
  std::array<double, 2> input_phases{0.0, 0.0};
};

GaugeDecomposition gauge_fix(const Eigen::Matrix2cd& w);

/// The gauge-fixed representative [[r00, r01], [r10, r11 e^{i phi11}]].
Eigen::Matrix2cd gauge_canonical_matrix(const Eigen::Matrix2d& magnitudes, double phi11);

SingleLineData simulate_single_line(const TransferMatrix& v, const ProbeConfig& cfg);
DualLineData simulate_dual_line(const TransferMatrix& v, const ProbeConfig& cfg);
ProbeDataset simulate_probe(const TransferMatrix& v, const ProbeConfig& cfg);

/// Reconstruction of the gate from a probe dataset, with covariance-based
/// uncertainty propagation. gamma holds the single-line magnitude means
/// (gamma_mn = r_mn / sqrt(eta)); the covariance is ordered
/// (gamma00, gamma01, gamma10, gamma11, phi11).
struct Reconstruction {
  Eigen::Matrix2d gamma;
  double phi11 = 0.0;
  double phi_i_fit = 0.0;
  Eigen::Matrix<double, 5, 5> covariance;
  double fidelity = 0.0;
  double fidelity_err = 0.0;
  double modified_success = 0.0;
  double modified_success_err = 0.0;
};

Reconstruction reconstruct(const ProbeDataset& ds);

/// Result of scanning the second modulator drive phase to minimize the
/// sideband power scattered out of a side-bin probe.
struct AlignmentScan {
  double aligned_phase = 0.0;  // in [0, 2pi)
  double residual_min = 0.0;
  double residual_max = 0.0;
  bool degenerate = false;  // objective flat (no modulation)
};

/// Phase alignment at small modulation index (theta <= 0.2): probes bin -1 of
/// a step-pi six-channel shaper and returns the drive phase of the second
/// modulator that minimizes the out-of-bin residual power.
AlignmentScan align_out_of_phase(double theta_small, double phase2_guess);

}  // namespace qfp
