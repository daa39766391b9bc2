#include "qfp/transfer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace qfp {

namespace {

using Complex = std::complex<double>;

// V_{mn} = sum_k d_{m-k} T_k c_{k-n} over the shaper band, with the window
// [-K - B/2, K + B/2 + N] sized from the truncation order so the mass left
// outside every column is below tail_tol.
TransferMatrix compose(const ShaperSpec& shaper, int n_inputs, int input_origin, double tail_tol,
                       int trunc_k, const std::function<Complex(int)>& c,
                       const std::function<Complex(int)>& d) {
  TransferMatrix v;
  v.n_inputs = n_inputs;
  v.input_origin = input_origin;
  v.tail_tol = tail_tol;
  v.m_min = -trunc_k - shaper.channel_count / 2;
  v.m_max = trunc_k + shaper.channel_count / 2 + n_inputs;
  v.entries = Eigen::MatrixXcd::Zero(v.rows(), n_inputs);

  // d evaluated once over every m - k the loops can produce.
  const int d_min = v.m_min - shaper.k_max();
  const int d_max = v.m_max - shaper.k_min();
  Eigen::VectorXcd d_vals(d_max - d_min + 1);
  for (int ell = d_min; ell <= d_max; ++ell) d_vals[ell - d_min] = d(ell);

  for (int j = 0; j < n_inputs; ++j) {
    const int n = input_origin + j;
    for (int k = shaper.k_min(); k <= shaper.k_max(); ++k) {
      const Complex t_k = shaper.transmission(k);
      if (t_k == Complex(0.0, 0.0)) continue;
      const Complex weight = t_k * c(k - n);
      v.entries.col(j) += weight * d_vals.segment(v.m_min - k - d_min, v.rows());
    }
  }
  return v;
}

double sign_pow(int sign, int ell) { return (sign < 0 && (ell & 1)) ? -1.0 : 1.0; }

int required_order(const ShaperSpec& shaper, int n_inputs, int input_origin, int trunc_k) {
  const int b_half = shaper.channel_count / 2;
  const int m_span = trunc_k + b_half + n_inputs + b_half;  // |m - k| bound
  const int n_span = b_half + std::abs(input_origin) + n_inputs;  // |k - n| bound
  return std::max(m_span, n_span) + 1;
}

}  // namespace

std::complex<double> TransferMatrix::at(int m, int n) const {
  if (m < m_min || m > m_max) throw std::out_of_range("TransferMatrix::at: m outside window");
  if (n < 0 || n >= n_inputs) throw std::out_of_range("TransferMatrix::at: column out of range");
  return entries(m - m_min, n);
}

TransferMatrix build_transfer(const ModulatorSpec& mod1, const ShaperSpec& shaper,
                              const ModulatorSpec& mod2, int n_inputs, double tail_tol) {
  mod1.validate();
  mod2.validate();
  shaper.validate();
  if (n_inputs < 1) throw std::invalid_argument("build_transfer: n_inputs must be >= 1");
  if (!(tail_tol > 0.0)) throw std::domain_error("build_transfer: tail_tol must be > 0");

  const int k_trunc = std::max(truncation_order(mod1.theta, tail_tol),
                               truncation_order(mod2.theta, tail_tol));
  const int order = required_order(shaper, n_inputs, 0, k_trunc);
  const auto row1 = bessel_row(mod1.theta, order);
  const auto row2 = bessel_row(mod2.theta, order);
  const int s1 = mod1.sign;
  const int s2 = mod2.sign;

  return compose(
      shaper, n_inputs, 0, tail_tol, k_trunc,
      [&](int ell) { return Complex(sign_pow(s1, ell) * row1(ell), 0.0); },
      [&](int ell) { return Complex(sign_pow(s2, ell) * row2(ell), 0.0); });
}

TransferMatrix build_transfer_phased(double theta1, double psi1, const ShaperSpec& shaper,
                                     double theta2, double psi2, int n_inputs,
                                     int input_origin, double tail_tol) {
  shaper.validate();
  if (n_inputs < 1) throw std::invalid_argument("build_transfer_phased: n_inputs must be >= 1");
  if (!(tail_tol > 0.0)) throw std::domain_error("build_transfer_phased: tail_tol must be > 0");

  const int k_trunc = std::max(truncation_order(theta1, tail_tol),
                               truncation_order(theta2, tail_tol));
  const int order = required_order(shaper, n_inputs, input_origin, k_trunc);
  const auto row1 = bessel_row(theta1, order);
  const auto row2 = bessel_row(theta2, order);

  return compose(
      shaper, n_inputs, input_origin, tail_tol, k_trunc,
      [&](int ell) { return row1(ell) * std::polar(1.0, ell * psi1); },
      [&](int ell) { return row2(ell) * std::polar(1.0, ell * psi2); });
}

Eigen::MatrixXcd computational_submatrix(const TransferMatrix& v) {
  if (v.input_origin != 0)
    throw std::logic_error("computational_submatrix: transfer built with shifted inputs");
  if (v.m_min > 0 || v.m_max < v.n_inputs - 1)
    throw std::logic_error("computational_submatrix: window does not cover the computational bins");
  return v.entries.middleRows(-v.m_min, v.n_inputs);
}

std::complex<double> eq2_transfer(int channels, double alpha, double theta,
                                  int n_inputs, int m, int n) {
  if (channels < 2 || channels % 2 != 0)
    throw std::invalid_argument("eq2_transfer: channels must be an even integer >= 2");
  if (n_inputs < 1) throw std::invalid_argument("eq2_transfer: n_inputs must be >= 1");
  if (n < 0 || n >= n_inputs)
    throw std::invalid_argument("eq2_transfer: n must lie in [0, n_inputs)");

  const int b_half = channels / 2;
  const auto row = bessel_row(theta, std::max(std::abs(m), std::abs(n)) + b_half);
  const Complex phase = std::polar(1.0, alpha);

  Complex sum(0.0, 0.0);
  for (int k = 1; k <= b_half; ++k)
    sum += row(m + k - 1) * row(n + k - 1) + phase * row(m - k) * row(n - k);
  return sum;
}

TransferMatrix canonical_transfer(int channels, double alpha, double theta,
                                  int n_inputs, double tail_tol) {
  return build_transfer(ModulatorSpec{theta, -1}, ShaperSpec::step_phase(channels, alpha),
                        ModulatorSpec{theta, +1}, n_inputs, tail_tol);
}

}  // namespace qfp
