#include "qfp/metrics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace qfp {

double fidelity(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& target) {
  if (w.rows() != w.cols() || target.rows() != w.rows() || target.cols() != w.cols())
    throw std::invalid_argument("fidelity: W and target must be square matrices of equal size");

  const auto n = target.rows();
  const double unitary_defect =
      (target.adjoint() * target - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (unitary_defect > 1e-12)
    throw std::invalid_argument("fidelity: target is not unitary (defect > 1e-12)");

  const double tr_ww = w.squaredNorm();
  if (!(tr_ww > 0.0)) throw UndefinedMetricError("fidelity: Tr W^dag W is zero");
  const double tr_uu = target.squaredNorm();

  const std::complex<double> overlap = (target.adjoint() * w).trace();
  return std::norm(overlap) / (tr_uu * tr_ww);
}

SuccessMetrics success(const TransferMatrix& v, const Eigen::MatrixXcd& w) {
  const double tr_vv = v.total_mass();
  if (!(tr_vv > 0.0)) throw UndefinedMetricError("success: Tr V^dag V is zero");
  const double tr_ww = w.squaredNorm();
  const double n = static_cast<double>(v.n_inputs);

  SuccessMetrics out;
  out.success = tr_ww / n;
  out.modified_success = tr_ww / tr_vv;
  out.eta = tr_vv / n;
  return out;
}

SplitterRatios splitter_ratios(const Eigen::MatrixXcd& w) {
  if (w.rows() != 2 || w.cols() != 2)
    throw std::invalid_argument("splitter_ratios: requires a 2x2 computational submatrix");
  SplitterRatios r;
  r.r_0to1 = std::norm(w(1, 0));
  r.r_1to0 = std::norm(w(0, 1));
  r.t_0to0 = std::norm(w(0, 0));
  r.t_1to1 = std::norm(w(1, 1));
  return r;
}

Eigen::Matrix2cd hadamard_target() {
  Eigen::Matrix2cd h;
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

GateMetrics gate_metrics(const TransferMatrix& v, const Eigen::MatrixXcd& target) {
  GateMetrics g;
  g.w = computational_submatrix(v);
  g.fidelity = fidelity(g.w, target);
  const SuccessMetrics s = success(v, g.w);
  g.success = s.success;
  g.modified_success = s.modified_success;
  g.eta = s.eta;
  return g;
}

std::vector<ChannelLimitRow> large_b_limit_check(double alpha, double theta,
                                                 const std::vector<int>& b_values,
                                                 double tail_tol) {
  for (std::size_t i = 0; i < b_values.size(); ++i) {
    if (b_values[i] < 2 || b_values[i] % 2 != 0)
      throw std::invalid_argument("large_b_limit_check: B values must be even and >= 2");
    if (i > 0 && b_values[i] <= b_values[i - 1])
      throw std::invalid_argument("large_b_limit_check: B values must be strictly ascending");
  }

  std::vector<ChannelLimitRow> table;
  table.reserve(b_values.size());
  for (int b : b_values) {
    const TransferMatrix v = canonical_transfer(b, alpha, theta, 2, tail_tol);
    const SuccessMetrics s = success(v, computational_submatrix(v));
    table.push_back({b, s.success, s.modified_success});
  }
  return table;
}

}  // namespace qfp
