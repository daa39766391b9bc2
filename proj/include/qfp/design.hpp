#pragma once

#include "qfp/metrics.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qfp {

/// Raised when an optimizer bracket has no interior maximum.
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameters held fixed during a sweep. The swept one is reported as NaN
/// (or 0 for the channel count).
struct SweepFixedParams {
  int channels = 0;
  double alpha = 0.0;
  double theta = 0.0;
  int n_inputs = 2;
  double tail_tol = kDefaultTailTol;
};

struct SweepRecord {
  double axis_value = 0.0;
  GateMetrics metrics;
  SplitterRatios ratios;
};

struct SweepResult {
  std::string axis_name;  // "B", "alpha" or "theta"
  SweepFixedParams fixed;
  std::vector<SweepRecord> points;
};

SweepResult sweep_channels(double alpha, double theta, const std::vector<int>& b_values,
                           int n_inputs, double tail_tol = kDefaultTailTol, int threads = 1);

SweepResult sweep_alpha(int channels, double theta, const std::vector<double>& alpha_values,
                        int n_inputs, double tail_tol = kDefaultTailTol, int threads = 1);

SweepResult sweep_theta(int channels, double alpha, const std::vector<double>& theta_values,
                        int n_inputs, double tail_tol = kDefaultTailTol, int threads = 1);

enum class DesignObjective { kFidelity, kFidelityTimesSuccess };

struct BracketStep {
  double lower = 0.0;
  double upper = 0.0;
  double theta = 0.0;
  double value = 0.0;
};

struct OptimumReport {
  DesignObjective objective = DesignObjective::kFidelity;
  double theta_star = 0.0;
  double alpha_star = 0.0;  // equals the fixed alpha for the 1-D search
  GateMetrics metrics;
  int iterations = 0;
  std::vector<BracketStep> trace;
  bool flat_objective = false;   // objective range below 1e-9 across the bracket
  double grid_step = 0.0;        // resolution of the confirmation grid
  double grid_theta = 0.0;       // argmax of the confirmation grid
  double grid_value = 0.0;
};

/// Golden-section search for the theta maximizing the objective against the
/// Hadamard target, followed by a 1e-5 local grid confirmation.
OptimumReport optimize_hadamard(int channels, double alpha, double bracket_lo, double bracket_hi,
                                DesignObjective objective = DesignObjective::kFidelity,
                                double tail_tol = kDefaultTailTol);

/// Alternating 1-D searches over (alpha, theta). Not tied to a published
/// operating point; reported with the same record type.
OptimumReport optimize_joint(int channels, double alpha_lo, double alpha_hi,
                             double theta_lo, double theta_hi,
                             DesignObjective objective = DesignObjective::kFidelity,
                             double tail_tol = kDefaultTailTol);

}  // namespace qfp
