#include "qfp/probe.hpp"

#include "qfp/metrics.hpp"

#include <Eigen/Dense>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qfp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0) w += kTwoPi;
  return w;
}

// Counter-based normal deviates: every (seed, stream, replicate, bin) maps to
// an independent draw, so generation order does not matter.
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit_interval(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream ^ splitmix64(a ^ splitmix64(b))));
  const double u1 = to_unit_interval(key);
  const double u2 = to_unit_interval(splitmix64(key ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Streams keep single-line, dual-line and common-mode draws disjoint.
enum Stream : std::uint64_t {
  kSingleLine = 1000,
  kSingleCommon = 2000,
  kDualLine = 3000,
  kDualCommon = 4000,
};

// One noisy spectrum, normalized to unit total power; `total` receives the
// raw divisor (the detected power before normalization).
Eigen::VectorXd measured_spectrum(const Eigen::VectorXd& truth, const ProbeConfig& cfg,
                                  std::uint64_t noise_stream, std::uint64_t common_stream,
                                  int replicate, double& total) {
  Eigen::VectorXd raw(truth.size());
  const double common =
      std::max(0.0, 1.0 + cfg.sigma_common *
                              counter_normal(cfg.rng_seed, common_stream, replicate, 0));
  for (int i = 0; i < truth.size(); ++i) {
    const double jitter =
        1.0 + cfg.sigma * counter_normal(cfg.rng_seed, noise_stream, replicate, i);
    raw[i] = truth[i] * std::max(0.0, jitter) * common;
  }
  total = raw.sum();
  if (!(total > 0.0)) throw ReconstructionError("probe: measured spectrum has zero total power");
  return raw / total;
}

struct SinusoidFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;          // model: offset + amplitude * cos(phi_s + base + phase)
  double phase_var = 0.0;      // delta-method variance of `phase`
  double amplitude_var = 0.0;
  int dof = 0;
};

// Ordinary least squares of y = c + A cos(phi + base) + B sin(phi + base);
// amplitude/phase follow from (A, B), with their covariance propagated.
SinusoidFit fit_sinusoid(const Eigen::VectorXd& y, const std::vector<double>& phis, double base) {
  const int n = static_cast<int>(phis.size());
  Eigen::MatrixXd x(n, 3);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(phis[i] + base);
    x(i, 2) = std::sin(phis[i] + base);
  }
  const Eigen::Vector3d beta = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - x * beta;
  const int dof = n - 3;
  const double s2 = resid.squaredNorm() / dof;
  const Eigen::Matrix3d cov = s2 * (x.transpose() * x).inverse();

  SinusoidFit fit;
  fit.offset = beta[0];
  const double a = beta[1], b = beta[2];
  fit.amplitude = std::hypot(a, b);
  fit.phase = std::atan2(-b, a);
  fit.dof = dof;
  if (fit.amplitude > 0.0) {
    const double da = b / (fit.amplitude * fit.amplitude);
    const double db = -a / (fit.amplitude * fit.amplitude);
    fit.phase_var = da * da * cov(1, 1) + db * db * cov(2, 2) + 2.0 * da * db * cov(1, 2);
    const double ua = a / fit.amplitude, ub = b / fit.amplitude;
    fit.amplitude_var = ua * ua * cov(1, 1) + ub * ub * cov(2, 2) + 2.0 * ua * ub * cov(1, 2);
  }
  return fit;
}

void require_flat_check(const SinusoidFit& fit, const char* channel) {
  const double floor = std::max(1e-10, 4.0 * std::sqrt(std::max(0.0, fit.amplitude_var)));
  if (fit.amplitude < floor)
    throw ReconstructionError(std::string("reconstruct: ") + channel +
                              " fringe is flat; the interference phase is unidentifiable");
}

}  // namespace

std::vector<double> ProbeConfig::uniform_grid(int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = kTwoPi * i / points;
  return grid;
}

std::vector<double> ProbeConfig::resolved_grid() const {
  return phase_grid.empty() ? uniform_grid(16) : phase_grid;
}

void ProbeConfig::validate() const {
  if (replicates < 2) throw std::invalid_argument("ProbeConfig: replicates must be >= 2");
  if (!(loss > 0.0) || loss > 1.0) throw std::invalid_argument("ProbeConfig: loss must lie in (0, 1]");
  if (sigma < 0.0 || sigma_common < 0.0)
    throw std::invalid_argument("ProbeConfig: noise sigmas must be >= 0");
  const auto grid = resolved_grid();
  const int n = static_cast<int>(grid.size());
  if (n < 8) throw std::invalid_argument("ProbeConfig: phase grid needs at least 8 points");
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (*hi - *lo < kTwoPi * (1.0 - 2.0 / n))
    throw std::invalid_argument("ProbeConfig: phase grid must cover a full 2pi scan");
}

GaugeDecomposition gauge_fix(const Eigen::Matrix2cd& w) {
  GaugeDecomposition g;
  g.magnitudes = w.cwiseAbs();
  g.phi11 = wrap_angle(std::arg(w(0, 0)) + std::arg(w(1, 1)) -
                       std::arg(w(0, 1)) - std::arg(w(1, 0)));
  g.input_phases = {-std::arg(w(0, 0)), -std::arg(w(0, 1))};
  return g;
}

Eigen::Matrix2cd gauge_canonical_matrix(const Eigen::Matrix2d& magnitudes, double phi11) {
  Eigen::Matrix2cd w;
  w(0, 0) = magnitudes(0, 0);
  w(0, 1) = magnitudes(0, 1);
  w(1, 0) = magnitudes(1, 0);
  w(1, 1) = magnitudes(1, 1) * std::polar(1.0, phi11);
  return w;
}

SingleLineData simulate_single_line(const TransferMatrix& v, const ProbeConfig& cfg) {
  cfg.validate();
  if (v.n_inputs != 2 || v.input_origin != 0)
    throw std::invalid_argument("simulate_single_line: requires a 2-input transfer at origin 0");

  SingleLineData out;
  out.m_min = v.m_min;
  out.m_max = v.m_max;
  const double l2 = cfg.loss * cfg.loss;
  for (int n = 0; n < 2; ++n) {
    const Eigen::VectorXd truth = l2 * v.entries.col(n).cwiseAbs2();
    out.powers[n].resize(cfg.replicates, v.rows());
    out.totals[n].resize(cfg.replicates);
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      double total = 0.0;
      out.powers[n].row(rep) =
          measured_spectrum(truth, cfg, kSingleLine + n, kSingleCommon + n, rep, total).transpose();
      out.totals[n][rep] = total;
    }
  }
  return out;
}

DualLineData simulate_dual_line(const TransferMatrix& v, const ProbeConfig& cfg) {
  cfg.validate();
  if (v.n_inputs != 2 || v.input_origin != 0)
    throw std::invalid_argument("simulate_dual_line: requires a 2-input transfer at origin 0");

  // Column phases from the gauge so the recorded fringes follow the
  // gauge-fixed magnitudes with phi_i as the only extra offset.
  const GaugeDecomposition gauge = gauge_fix(computational_submatrix(v));
  const Eigen::VectorXcd col0 = v.entries.col(0) * std::polar(1.0, gauge.input_phases[0]);
  const Eigen::VectorXcd col1 = v.entries.col(1) * std::polar(1.0, gauge.input_phases[1]);

  DualLineData out;
  out.phase_grid = cfg.resolved_grid();
  const int n_phase = static_cast<int>(out.phase_grid.size());
  out.rho0.resize(cfg.replicates, n_phase);
  out.rho1.resize(cfg.replicates, n_phase);
  out.totals.resize(cfg.replicates, n_phase);

  const double l2 = cfg.loss * cfg.loss;
  const int bin0 = v.row_of(0);
  const int bin1 = v.row_of(1);
  for (int j = 0; j < n_phase; ++j) {
    const std::complex<double> drive = std::polar(1.0, cfg.phi_i + out.phase_grid[j]);
    const Eigen::VectorXd truth = (l2 / 2.0) * (col0 + drive * col1).cwiseAbs2();
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      double total = 0.0;
      const Eigen::VectorXd p =
          measured_spectrum(truth, cfg, kDualLine + j, kDualCommon + j, rep, total);
      out.rho0(rep, j) = p[bin0];
      out.rho1(rep, j) = p[bin1];
      out.totals(rep, j) = total;
    }
  }
  return out;
}

ProbeDataset simulate_probe(const TransferMatrix& v, const ProbeConfig& cfg) {
  ProbeDataset ds;
  ds.replicates = cfg.replicates;
  ds.single_line = simulate_single_line(v, cfg);
  ds.dual_line = simulate_dual_line(v, cfg);
  return ds;
}

Reconstruction reconstruct(const ProbeDataset& ds) {
  const int reps = ds.replicates;
  if (reps < 2) throw std::invalid_argument("reconstruct: needs at least 2 replicates");
  const auto& phis = ds.dual_line.phase_grid;
  const int n_phase = static_cast<int>(phis.size());
  if (n_phase < 8) throw std::invalid_argument("reconstruct: phase grid needs at least 8 points");
  if (ds.single_line.m_min > 0 || ds.single_line.m_max < 1)
    throw std::invalid_argument("reconstruct: dataset window misses the computational bins");

  const int bin0 = -ds.single_line.m_min;
  const int bin1 = bin0 + 1;

  // Per-replicate gamma 4-vector (g00, g01, g10, g11): bins 0/1 of each
  // normalized single-line spectrum.
  Eigen::MatrixXd g(reps, 4);
  for (int rep = 0; rep < reps; ++rep) {
    g(rep, 0) = std::sqrt(ds.single_line.powers[0](rep, bin0));
    g(rep, 1) = std::sqrt(ds.single_line.powers[1](rep, bin0));
    g(rep, 2) = std::sqrt(ds.single_line.powers[0](rep, bin1));
    g(rep, 3) = std::sqrt(ds.single_line.powers[1](rep, bin1));
  }
  const Eigen::Vector4d mean = g.colwise().mean();
  const Eigen::MatrixXd centered = g.rowwise() - mean.transpose();
  const Eigen::Matrix4d cov = (centered.transpose() * centered) / (reps - 1);

  // Two-stage fringe fit on the replicate means: rho0 pins the instrument
  // phase, then rho1 yields phi11 with that phase held fixed.
  const Eigen::VectorXd rho0_mean = ds.dual_line.rho0.colwise().mean();
  const Eigen::VectorXd rho1_mean = ds.dual_line.rho1.colwise().mean();

  const SinusoidFit fit0 = fit_sinusoid(rho0_mean, phis, 0.0);
  require_flat_check(fit0, "rho0");
  const double phi_i = fit0.phase;

  const SinusoidFit fit1 = fit_sinusoid(rho1_mean, phis, phi_i);
  require_flat_check(fit1, "rho1");
  const double phi11 = wrap_angle(fit1.phase);

  // Var(phi11): square of a quarter of the 95% confidence interval width.
  const boost::math::students_t dist(fit1.dof);
  const double t95 = boost::math::quantile(dist, 0.975);
  const double se = std::sqrt(std::max(0.0, fit1.phase_var));
  const double var_phi11 = std::pow(2.0 * t95 * se / 4.0, 2);

  Reconstruction rec;
  rec.gamma << mean[0], mean[1], mean[2], mean[3];
  rec.phi11 = phi11;
  rec.phi_i_fit = wrap_angle(phi_i);
  rec.covariance.setZero();
  rec.covariance.topLeftCorner<4, 4>() = cov;
  rec.covariance(4, 4) = var_phi11;

  // P~ = (g00^2 + g01^2 + g10^2 + g11^2) / 2, gradient = gamma vector.
  rec.modified_success = mean.squaredNorm() / 2.0;
  rec.modified_success_err = std::sqrt(std::max(0.0, mean.dot(cov * mean)));

  // F = |g00 + g01 + g10 - g11 e^{i phi11}|^2 / (4 sum gamma^2)
  const double x = mean[0] + mean[1] + mean[2];
  const double g11 = mean[3];
  const double c = std::cos(phi11);
  const double g2 = mean.squaredNorm();
  const double num = x * x - 2.0 * x * g11 * c + g11 * g11;
  rec.fidelity = num / (4.0 * g2);

  Eigen::Vector4d grad;
  const double dnum_dx = 2.0 * (x - g11 * c);
  for (int i = 0; i < 3; ++i)
    grad[i] = (dnum_dx * g2 - num * 2.0 * mean[i]) / (4.0 * g2 * g2);
  const double dnum_dg11 = -2.0 * x * c + 2.0 * g11;
  grad[3] = (dnum_dg11 * g2 - num * 2.0 * g11) / (4.0 * g2 * g2);
  const double df_dphi = (2.0 * x * g11 * std::sin(phi11)) / (4.0 * g2);
  const double var_f = grad.dot(cov * grad) + df_dphi * df_dphi * var_phi11;
  rec.fidelity_err = std::sqrt(std::max(0.0, var_f));
  return rec;
}

AlignmentScan align_out_of_phase(double theta_small, double phase2_guess) {
  if (!(theta_small >= 0.0) || theta_small > 0.2)
    throw std::invalid_argument("align_out_of_phase: theta_small must lie in [0, 0.2]");

  const ShaperSpec shaper = ShaperSpec::step_phase(6, std::numbers::pi);
  const int probe_bin = -1;
  const auto residual = [&](double psi2) {
    const TransferMatrix v =
        build_transfer_phased(theta_small, 0.0, shaper, theta_small, psi2, 1, probe_bin);
    return v.total_mass() - std::norm(v.at(probe_bin, 0));
  };

  const int scan_n = 720;
  AlignmentScan out;
  double best = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < scan_n; ++i) {
    const double psi2 = phase2_guess + kTwoPi * i / scan_n;
    const double r = residual(psi2);
    if (r < best) {
      best = r;
      best_i = i;
    }
    worst = std::max(worst, r);
  }
  out.residual_max = worst;

  if (worst - best < 1e-14) {
    out.degenerate = true;
    out.aligned_phase = wrap_angle(phase2_guess);
    out.residual_min = best;
    return out;
  }

  // Golden-section refinement on the bracketing scan cell.
  const double step = kTwoPi / scan_n;
  double a = phase2_guess + step * (best_i - 1);
  double b = phase2_guess + step * (best_i + 1);
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = residual(x1), f2 = residual(x2);
  while (b - a > 1e-10) {
    if (f1 > f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = residual(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = residual(x1);
    }
  }
  out.aligned_phase = wrap_angle(0.5 * (a + b));
  out.residual_min = residual(0.5 * (a + b));
  return out;
}

}  // namespace qfp
