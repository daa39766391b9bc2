#pragma once

#include "qfp/transfer.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace qfp {

/// Raised when a metric is undefined for the given inputs (e.g. zero W).
struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SuccessMetrics {
  double success = 0.0;           // P  = Tr W^dag W / N
  double modified_success = 0.0;  // P~ = Tr W^dag W / Tr V^dag V
  double eta = 0.0;               // Tr V^dag V / N
};

struct GateMetrics {
  double fidelity = 0.0;
  double success = 0.0;
  double modified_success = 0.0;
  double eta = 0.0;
  Eigen::MatrixXcd w;
};

/// Squared magnitudes of the 2x2 computational submatrix: mode conversion
/// (reflectivity) and preservation (transmissivity) fractions.
struct SplitterRatios {
  double r_0to1 = 0.0;  // |W_10|^2
  double r_1to0 = 0.0;  // |W_01|^2
  double t_0to0 = 0.0;  // |W_00|^2
  double t_1to1 = 0.0;  // |W_11|^2
};

/// |Tr U^dag W|^2 / (Tr U^dag U . Tr W^dag W). U must be unitary to 1e-12.
double fidelity(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& target);

SuccessMetrics success(const TransferMatrix& v, const Eigen::MatrixXcd& w);

SplitterRatios splitter_ratios(const Eigen::MatrixXcd& w);

Eigen::Matrix2cd hadamard_target();

/// Convenience: submatrix, fidelity and success metrics in one record.
GateMetrics gate_metrics(const TransferMatrix& v, const Eigen::MatrixXcd& target);

struct ChannelLimitRow {
  int channels = 0;
  double success = 0.0;
  double modified_success = 0.0;
};

/// (B, P, P~) table for the canonical family over an ascending even B list;
/// the P~ - P gap closes as the shaper window captures the sideband ladder.
std::vector<ChannelLimitRow> large_b_limit_check(double alpha, double theta,
                                                 const std::vector<int>& b_values,
                                                 double tail_tol = kDefaultTailTol);

}  // namespace qfp
