#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qfp {

/// Design envelope for modulation indices and Bessel arguments, in radians.
inline constexpr double kThetaEnvelope = 20.0;

/// Default tolerance for truncating the (formally infinite) sideband series.
inline constexpr double kDefaultTailTol = 1e-16;

namespace detail {

template <typename Scalar>
void check_envelope(Scalar theta) {
  if (!(std::abs(theta) <= Scalar(kThetaEnvelope)))
    throw std::domain_error("bessel: argument outside the design envelope |theta| <= 20 rad");
}

// J_0(x)..J_K(x) by the ascending power series; used for small arguments
// where it converges in a handful of terms.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> series_row(Scalar x, int max_order) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(max_order + 1);
  const Scalar q = Scalar(0.25) * x * x;
  Scalar front = Scalar(1);  // (x/2)^n / n!
  for (int n = 0; n <= max_order; ++n) {
    if (n > 0) front *= x / Scalar(2 * n);
    Scalar term = front;
    Scalar sum = front;
    for (int j = 1; j < 64 && term != Scalar(0); ++j) {
      term *= -q / (Scalar(j) * Scalar(n + j));
      sum += term;
      if (std::abs(term) <= std::numeric_limits<Scalar>::epsilon() * std::abs(sum)) break;
    }
    out[n] = sum;
  }
  return out;
}

// J_0(x)..J_K(x) by backward (Miller) recurrence. The raw downward solution
// is proportional to J_l with a positive constant; the scale is fixed by
// J_0^2 + 2 sum_{k>=1} J_k^2 = 1.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> miller_row(Scalar x, int max_order) {
  const int base = std::max(max_order, static_cast<int>(std::ceil(x)));
  const int top = base + 16 + static_cast<int>(std::sqrt(Scalar(40) * Scalar(base + 1)));
  // Rescale threshold low enough that the squared entries in the Parseval
  // normalization sum cannot overflow.
  const Scalar big = Scalar(1e130);

  Eigen::Array<Scalar, Eigen::Dynamic, 1> f(top + 2);
  f[top + 1] = Scalar(0);
  f[top] = Scalar(1e-30);
  for (int l = top; l >= 1; --l) {
    f[l - 1] = (Scalar(2 * l) / x) * f[l] - f[l + 1];
    if (std::abs(f[l - 1]) > big) f.segment(l - 1, top - l + 3) /= big;
  }

  Scalar norm = f[0] * f[0];
  for (int k = 1; k <= top; ++k) norm += Scalar(2) * f[k] * f[k];
  return f.head(max_order + 1) / std::sqrt(norm);
}

// Row for x >= 0. Series below 0.5, Miller recurrence above.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> nonneg_row(Scalar x, int max_order) {
  if (x == Scalar(0)) {
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(max_order + 1);
    out[0] = Scalar(1);
    return out;
  }
  if (x < Scalar(0.5)) return series_row(x, max_order);
  return miller_row(x, max_order);
}

inline constexpr int parity(int ell) { return (ell & 1) ? -1 : 1; }

}  // namespace detail

/// J_l(theta) for all integer orders l in [-max_order, max_order].
template <typename Scalar = double>
struct BesselRow {
  Scalar theta{};
  int max_order{};
  Eigen::Array<Scalar, Eigen::Dynamic, 1> values;  // index l + max_order

  Scalar operator()(int ell) const { return values[ell + max_order]; }
};

template <typename Scalar>
BesselRow<Scalar> bessel_row(Scalar theta, int max_order) {
  detail::check_envelope(theta);
  if (max_order < 0) throw std::invalid_argument("bessel_row: max_order must be >= 0");

  const Scalar ax = std::abs(theta);
  const auto pos = detail::nonneg_row(ax, max_order);

  BesselRow<Scalar> row;
  row.theta = theta;
  row.max_order = max_order;
  row.values.resize(2 * max_order + 1);
  for (int ell = -max_order; ell <= max_order; ++ell) {
    // J_{-l}(x) = (-1)^l J_l(x) and J_l(-x) = (-1)^l J_l(x)
    int s = 1;
    if (ell < 0) s *= detail::parity(ell);
    if (theta < Scalar(0)) s *= detail::parity(ell);
    row.values[ell + max_order] = Scalar(s) * pos[std::abs(ell)];
  }
  return row;
}

/// Bessel function of the first kind, integer order.
template <typename Scalar>
Scalar bessel_j(int order, Scalar theta) {
  detail::check_envelope(theta);
  const auto pos = detail::nonneg_row(std::abs(theta), std::abs(order));
  int s = 1;
  if (order < 0) s *= detail::parity(order);
  if (theta < Scalar(0)) s *= detail::parity(order);
  return Scalar(s) * pos[std::abs(order)];
}

/// Smallest K with 1 - sum_{|l|<=K} J_l(theta)^2 < tail_tol, i.e. the order
/// beyond which the sideband ladder carries less than tail_tol of the power.
template <typename Scalar>
int truncation_order(Scalar theta, Scalar tail_tol) {
  detail::check_envelope(theta);
  if (!(tail_tol > Scalar(0))) throw std::domain_error("truncation_order: tail_tol must be > 0");

  const Scalar ax = std::abs(theta);
  if (ax == Scalar(0)) return 0;

  const int cap = static_cast<int>(std::ceil(ax)) + 80;
  const auto row = detail::nonneg_row(ax, cap);

  // Accumulate the tail from the top so the residual is formed without
  // cancellation against 1.
  Scalar tail = Scalar(0);
  int k = cap;
  for (; k >= 1; --k) {
    const Scalar next = tail + Scalar(2) * row[k] * row[k];
    if (!(next < tail_tol)) break;
    tail = next;
  }
  return k;
}

}  // namespace qfp
