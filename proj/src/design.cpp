#include "qfp/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace qfp {

namespace {

constexpr double kFlatRange = 1e-9;
constexpr double kGridStep = 1e-5;

// Runs f(i) for i in [0, count) on up to `threads` workers; each index writes
// its own output slot, so assembly order is deterministic.
template <typename F>
void for_each_index(int count, int threads, F&& f) {
  threads = std::max(1, std::min({threads, count, static_cast<int>(std::thread::hardware_concurrency())}));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

SweepRecord evaluate_point(int channels, double alpha, double theta, int n_inputs,
                           double tail_tol, double axis_value) {
  const TransferMatrix v = canonical_transfer(channels, alpha, theta, n_inputs, tail_tol);
  SweepRecord rec;
  rec.axis_value = axis_value;
  rec.metrics = gate_metrics(v, hadamard_target());
  rec.ratios = splitter_ratios(rec.metrics.w);
  return rec;
}

void require_two_inputs(int n_inputs, const char* who) {
  if (n_inputs != 2)
    throw std::invalid_argument(std::string(who) + ": splitter sweeps are defined for n_inputs == 2");
}

double objective_value(const GateMetrics& g, DesignObjective obj) {
  return obj == DesignObjective::kFidelity ? g.fidelity : g.fidelity * g.modified_success;
}

struct GoldenOutcome {
  double x = 0.0;
  int iterations = 0;
  std::vector<BracketStep> trace;
};

// Golden-section maximization; deterministic for fixed inputs.
template <typename F>
GoldenOutcome golden_max(double lo, double hi, F&& f, double x_tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenOutcome out;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  out.trace.push_back({a, b, x1, f1});
  out.trace.push_back({a, b, x2, f2});
  while (b - a > x_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
      out.trace.push_back({a, b, x2, f2});
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
      out.trace.push_back({a, b, x1, f1});
    }
    ++out.iterations;
  }
  out.x = f1 > f2 ? x1 : x2;
  return out;
}

}  // namespace

SweepResult sweep_channels(double alpha, double theta, const std::vector<int>& b_values,
                           int n_inputs, double tail_tol, int threads) {
  require_two_inputs(n_inputs, "sweep_channels");
  for (std::size_t i = 0; i < b_values.size(); ++i) {
    if (b_values[i] < 2 || b_values[i] % 2 != 0)
      throw std::invalid_argument("sweep_channels: B values must be even and >= 2");
    if (i > 0 && b_values[i] <= b_values[i - 1])
      throw std::invalid_argument("sweep_channels: B values must be strictly ascending");
  }

  SweepResult res;
  res.axis_name = "B";
  res.fixed = {0, alpha, theta, n_inputs, tail_tol};
  res.points.resize(b_values.size());
  for_each_index(static_cast<int>(b_values.size()), threads, [&](int i) {
    res.points[i] = evaluate_point(b_values[i], alpha, theta, n_inputs, tail_tol,
                                   static_cast<double>(b_values[i]));
  });
  return res;
}

SweepResult sweep_alpha(int channels, double theta, const std::vector<double>& alpha_values,
                        int n_inputs, double tail_tol, int threads) {
  require_two_inputs(n_inputs, "sweep_alpha");
  for (std::size_t i = 0; i < alpha_values.size(); ++i) {
    if (alpha_values[i] < 0.0 || alpha_values[i] > 2.0 * M_PI + 1e-12)
      throw std::invalid_argument("sweep_alpha: alpha values must lie in [0, 2pi]");
    if (i > 0 && alpha_values[i] <= alpha_values[i - 1])
      throw std::invalid_argument("sweep_alpha: alpha values must be strictly ascending");
  }

  SweepResult res;
  res.axis_name = "alpha";
  res.fixed = {channels, std::numeric_limits<double>::quiet_NaN(), theta, n_inputs, tail_tol};
  res.points.resize(alpha_values.size());
  for_each_index(static_cast<int>(alpha_values.size()), threads, [&](int i) {
    res.points[i] = evaluate_point(channels, alpha_values[i], theta, n_inputs, tail_tol,
                                   alpha_values[i]);
  });
  return res;
}

SweepResult sweep_theta(int channels, double alpha, const std::vector<double>& theta_values,
                        int n_inputs, double tail_tol, int threads) {
  require_two_inputs(n_inputs, "sweep_theta");
  for (std::size_t i = 0; i < theta_values.size(); ++i) {
    if (theta_values[i] < 0.0 || theta_values[i] > 1.2)
      throw std::invalid_argument("sweep_theta: theta values must lie in [0, 1.2]");
    if (i > 0 && theta_values[i] <= theta_values[i - 1])
      throw std::invalid_argument("sweep_theta: theta values must be strictly ascending");
  }

  SweepResult res;
  res.axis_name = "theta";
  res.fixed = {channels, alpha, std::numeric_limits<double>::quiet_NaN(), n_inputs, tail_tol};
  res.points.resize(theta_values.size());
  for_each_index(static_cast<int>(theta_values.size()), threads, [&](int i) {
    res.points[i] = evaluate_point(channels, alpha, theta_values[i], n_inputs, tail_tol,
                                   theta_values[i]);
  });
  return res;
}

OptimumReport optimize_hadamard(int channels, double alpha, double bracket_lo, double bracket_hi,
                                DesignObjective objective, double tail_tol) {
  if (!(bracket_lo < bracket_hi))
    throw std::invalid_argument("optimize_hadamard: bracket must satisfy lo < hi");
  if (bracket_lo < 0.0 || bracket_hi > kThetaEnvelope)
    throw std::invalid_argument("optimize_hadamard: bracket must lie in [0, 20]");

  const auto value_at = [&](double theta) {
    const TransferMatrix v = canonical_transfer(channels, alpha, theta, 2, tail_tol);
    return objective_value(gate_metrics(v, hadamard_target()), objective);
  };

  GoldenOutcome golden = golden_max(bracket_lo, bracket_hi, value_at, 1e-8);

  // Coarse scan of the whole bracket: detects a flat objective and maxima
  // that sit on the bracket boundary.
  const int coarse_n = 200;
  double coarse_best = -std::numeric_limits<double>::infinity();
  double coarse_worst = std::numeric_limits<double>::infinity();
  int coarse_arg = 0;
  double interior_best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= coarse_n; ++i) {
    const double theta = bracket_lo + (bracket_hi - bracket_lo) * i / coarse_n;
    const double val = value_at(theta);
    if (val > coarse_best) {
      coarse_best = val;
      coarse_arg = i;
    }
    coarse_worst = std::min(coarse_worst, val);
    if (i != 0 && i != coarse_n) interior_best = std::max(interior_best, val);
  }

  const bool flat = (coarse_best - coarse_worst) < kFlatRange;
  if (!flat && (coarse_arg == 0 || coarse_arg == coarse_n) &&
      coarse_best - interior_best > kFlatRange)
    throw BracketError("optimize_hadamard: no interior maximum in the bracket");

  // Local grid confirmation at 1e-5 resolution around the golden argmax.
  const double span = 50 * kGridStep;
  const double g_lo = std::max(bracket_lo, golden.x - span);
  const double g_hi = std::min(bracket_hi, golden.x + span);
  double grid_theta = golden.x;
  double grid_value = -std::numeric_limits<double>::infinity();
  for (double theta = g_lo; theta <= g_hi + 0.5 * kGridStep; theta += kGridStep) {
    const double val = value_at(theta);
    if (val > grid_value) {
      grid_value = val;
      grid_theta = theta;
    }
  }

  const double golden_value = value_at(golden.x);
  OptimumReport report;
  report.objective = objective;
  report.theta_star = golden_value >= grid_value ? golden.x : grid_theta;
  report.alpha_star = alpha;
  report.iterations = golden.iterations;
  report.trace = std::move(golden.trace);
  report.flat_objective = flat;
  report.grid_step = kGridStep;
  report.grid_theta = grid_theta;
  report.grid_value = grid_value;
  const TransferMatrix v = canonical_transfer(channels, alpha, report.theta_star, 2, tail_tol);
  report.metrics = gate_metrics(v, hadamard_target());
  return report;
}

OptimumReport optimize_joint(int channels, double alpha_lo, double alpha_hi,
                             double theta_lo, double theta_hi,
                             DesignObjective objective, double tail_tol) {
  if (!(alpha_lo < alpha_hi) || !(theta_lo < theta_hi))
    throw std::invalid_argument("optimize_joint: brackets must satisfy lo < hi");

  double alpha = 0.5 * (alpha_lo + alpha_hi);
  double theta = 0.5 * (theta_lo + theta_hi);
  int iterations = 0;
  std::vector<BracketStep> trace;
  for (int round = 0; round < 4; ++round) {
    const auto theta_val = [&](double t) {
      const TransferMatrix v = canonical_transfer(channels, alpha, t, 2, tail_tol);
      return objective_value(gate_metrics(v, hadamard_target()), objective);
    };
    GoldenOutcome gt = golden_max(theta_lo, theta_hi, theta_val, 1e-7);
    theta = gt.x;
    iterations += gt.iterations;

    const auto alpha_val = [&](double a) {
      const TransferMatrix v = canonical_transfer(channels, a, theta, 2, tail_tol);
      return objective_value(gate_metrics(v, hadamard_target()), objective);
    };
    GoldenOutcome ga = golden_max(alpha_lo, alpha_hi, alpha_val, 1e-7);
    alpha = ga.x;
    iterations += ga.iterations;
    trace.push_back({theta_lo, theta_hi, theta, theta_val(theta)});
  }

  OptimumReport report;
  report.objective = objective;
  report.theta_star = theta;
  report.alpha_star = alpha;
  report.iterations = iterations;
  report.trace = std::move(trace);
  report.grid_step = 0.0;
  report.grid_theta = theta;
  const TransferMatrix v = canonical_transfer(channels, alpha, theta, 2, tail_tol);
  report.metrics = gate_metrics(v, hadamard_target());
  report.grid_value = objective_value(report.metrics, objective);
  return report;
}

}  // namespace qfp
