#pragma once

#include "qfp/probe.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfp::cli {

using json = nlohmann::ordered_json;

/// Raised for malformed or invalid configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses an angle that is either a number (radians) or a "pi" expression
/// such as "pi", "pi/3", "2pi/3", "-pi/2" or "0.5pi".
double parse_angle(const json& value, const std::string& key_path);

struct DeviceConfig {
  int channels = 6;
  std::optional<double> alpha;    // canonical step phase; absent if `phases` given
  std::vector<double> phases;     // per-channel phases (size == channels)
  std::vector<double> amplitudes; // defaults to all ones
  double theta1 = 0.8283;
  double theta2 = 0.8283;
  std::array<int, 2> signs{-1, +1};
  double bin_spacing_ghz = 3.0;
  int n_inputs = 2;

  bool canonical() const { return alpha.has_value(); }
};

struct TaskConfig {
  // metrics
  std::string target = "hadamard";  // or "identity"
  // sweep
  std::string axis;  // "B", "alpha", "theta"
  std::vector<int> b_values;
  std::vector<double> axis_values;
  // optimize
  std::array<double, 2> bracket{0.5, 1.1};
  std::string objective = "fidelity";  // or "fidelity_times_success"
  std::optional<std::array<double, 2>> alpha_bracket;
};

struct NumericsConfig {
  double tail_tol = kDefaultTailTol;
};

struct OutputConfig {
  std::string format = "json";  // or "csv" (sweep only)
  std::string path;             // empty: stdout
  int precision = 6;            // decimal places for reported metrics
};

struct RunConfig {
  std::string command;  // "metrics", "sweep", "optimize", "probe"
  DeviceConfig device;
  TaskConfig task;
  NumericsConfig numerics;
  ProbeConfig probe;
  OutputConfig output;
};

/// Strict parse: unknown keys are rejected with their key path.
RunConfig parse_config(const json& doc, const std::string& command);

/// Fully resolved echo of a config; parse_config(echo_config(c)) is
/// equivalent to c.
json echo_config(const RunConfig& cfg);

}  // namespace qfp::cli
