#pragma once

#include "qfp/device.hpp"

#include <Eigen/Core>

#include <complex>

namespace qfp {

/// Discrete frequency-bin transfer matrix V of a modulator-shaper-modulator
/// cascade. Rows span the output window [m_min, m_max]; column j corresponds
/// to input bin input_origin + j. The window is sized so that the per-column
/// mass outside it stays below tail_tol.
struct TransferMatrix {
  int n_inputs = 0;
  int input_origin = 0;
  int m_min = 0;
  int m_max = 0;
  double tail_tol = kDefaultTailTol;
  Eigen::MatrixXcd entries;  // (m_max - m_min + 1) x n_inputs

  int rows() const { return m_max - m_min + 1; }
  int row_of(int m) const { return m - m_min; }
  std::complex<double> at(int m, int n) const;
  double column_mass(int n) const { return entries.col(n).squaredNorm(); }
  double total_mass() const { return entries.squaredNorm(); }  // Tr V^dag V
};

/// General Toeplitz composition V_{mn} = sum_k d_{m-k} T_k c_{k-n} with
/// c_l = sign1^l J_l(theta1) and d_l = sign2^l J_l(theta2). The out-of-phase
/// pair (sign1, sign2) = (-1, +1) is the canonical configuration.
TransferMatrix build_transfer(const ModulatorSpec& mod1, const ShaperSpec& shaper,
                              const ModulatorSpec& mod2, int n_inputs,
                              double tail_tol = kDefaultTailTol);

/// Drive-phase-resolved builder with hop coefficients J_l(theta) e^{i l psi};
/// psi = 0 and psi = pi reproduce sign +1 and -1. input_origin shifts the
/// probed input bins, which is what the out-of-phase alignment scan needs.
TransferMatrix build_transfer_phased(double theta1, double psi1, const ShaperSpec& shaper,
                                     double theta2, double psi2, int n_inputs,
                                     int input_origin = 0, double tail_tol = kDefaultTailTol);

/// Rows 0..N-1 of V (requires input_origin 0 and a window covering them).
Eigen::MatrixXcd computational_submatrix(const TransferMatrix& v);

/// Closed-form entry for the canonical family:
/// V_{mn} = sum_{k=1}^{B/2} [ J_{m+k-1} J_{n+k-1} + e^{i alpha} J_{m-k} J_{n-k} ].
std::complex<double> eq2_transfer(int channels, double alpha, double theta,
                                  int n_inputs, int m, int n);

/// Out-of-phase modulators with a common theta and a step-alpha shaper.
TransferMatrix canonical_transfer(int channels, double alpha, double theta,
                                  int n_inputs = 2, double tail_tol = kDefaultTailTol);

}  // namespace qfp
