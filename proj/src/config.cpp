#include "qfp/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <set>

namespace qfp::cli {

namespace {

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config: " + path + " must be an object");
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError("config: unknown key '" + path + "." + item.key() + "'");
  }
}

double expect_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config: " + path + " must be a number");
  return j.get<double>();
}

int expect_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError("config: " + path + " must be an integer");
  return j.get<int>();
}

std::string expect_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("config: " + path + " must be a string");
  return j.get<std::string>();
}

}  // namespace

double parse_angle(const json& value, const std::string& key_path) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string())
    throw ConfigError("config: " + key_path + " must be a number or a pi expression string");

  static const std::regex pi_expr(
      R"(^\s*([+-]?)\s*(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$)");
  std::smatch m;
  const std::string text = value.get<std::string>();
  if (!std::regex_match(text, m, pi_expr))
    throw ConfigError("config: " + key_path + ": cannot parse angle '" + text +
                      "' (expected e.g. \"pi\", \"pi/3\", \"2pi/3\", \"-pi/2\")");
  double coeff = m[2].matched ? std::stod(m[2].str()) : 1.0;
  if (m[1].str() == "-") coeff = -coeff;
  const double divisor = m[3].matched ? std::stod(m[3].str()) : 1.0;
  if (divisor == 0.0) throw ConfigError("config: " + key_path + ": division by zero");
  return coeff * std::numbers::pi / divisor;
}

namespace {

DeviceConfig parse_device(const json& j) {
  DeviceConfig d;
  if (j.is_null()) {
    d.alpha = std::numbers::pi;
    return d;
  }
  expect_object(j, "device");
  expect_keys(j, "device",
              {"channels", "alpha", "phases", "amplitudes", "theta", "theta1", "theta2", "signs",
               "bin_spacing_ghz", "n"});

  if (j.contains("channels")) d.channels = expect_int(j["channels"], "device.channels");
  if (d.channels < 2 || d.channels % 2 != 0)
    throw ConfigError("config: device.channels must be an even integer >= 2");

  if (j.contains("alpha") && j.contains("phases"))
    throw ConfigError("config: device.alpha and device.phases are mutually exclusive");
  if (j.contains("phases")) {
    const auto& arr = j["phases"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != d.channels)
      throw ConfigError("config: device.phases must be an array of length device.channels");
    for (std::size_t i = 0; i < arr.size(); ++i)
      d.phases.push_back(parse_angle(arr[i], "device.phases[" + std::to_string(i) + "]"));
  } else {
    d.alpha = j.contains("alpha") ? parse_angle(j["alpha"], "device.alpha") : std::numbers::pi;
  }

  if (j.contains("amplitudes")) {
    const auto& arr = j["amplitudes"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != d.channels)
      throw ConfigError("config: device.amplitudes must be an array of length device.channels");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const double a = expect_number(arr[i], "device.amplitudes[" + std::to_string(i) + "]");
      if (a < 0.0 || a > 1.0)
        throw ConfigError("config: device.amplitudes must lie in [0, 1]");
      d.amplitudes.push_back(a);
    }
  }

  if (j.contains("theta") && (j.contains("theta1") || j.contains("theta2")))
    throw ConfigError("config: device.theta and device.theta1/theta2 are mutually exclusive");
  if (j.contains("theta")) {
    d.theta1 = d.theta2 = expect_number(j["theta"], "device.theta");
  } else {
    if (j.contains("theta1")) d.theta1 = expect_number(j["theta1"], "device.theta1");
    if (j.contains("theta2")) d.theta2 = expect_number(j["theta2"], "device.theta2");
  }
  for (double th : {d.theta1, d.theta2})
    if (!(th >= 0.0) || th > kThetaEnvelope)
      throw ConfigError("config: device theta values must lie in [0, 20]");

  if (j.contains("signs")) {
    const auto& arr = j["signs"];
    if (!arr.is_array() || arr.size() != 2)
      throw ConfigError("config: device.signs must be a 2-element array");
    d.signs = {expect_int(arr[0], "device.signs[0]"), expect_int(arr[1], "device.signs[1]")};
    for (int s : d.signs)
      if (s != 1 && s != -1) throw ConfigError("config: device.signs entries must be +1 or -1");
  }

  if (j.contains("bin_spacing_ghz"))
    d.bin_spacing_ghz = expect_number(j["bin_spacing_ghz"], "device.bin_spacing_ghz");
  if (!(d.bin_spacing_ghz > 0.0))
    throw ConfigError("config: device.bin_spacing_ghz must be positive");

  if (j.contains("n")) d.n_inputs = expect_int(j["n"], "device.n");
  if (d.n_inputs != 2)
    throw ConfigError("config: device.n: only the two-bin computational space is supported");
  return d;
}

std::vector<double> resolve_axis_values(const json& j, const std::string& axis) {
  const bool is_alpha = axis == "alpha";
  std::vector<double> values;
  if (j.contains("values")) {
    if (j.contains("start") || j.contains("stop") || j.contains("step"))
      throw ConfigError("config: task.values and task.start/stop/step are mutually exclusive");
    const auto& arr = j["values"];
    if (!arr.is_array() || arr.empty())
      throw ConfigError("config: task.values must be a non-empty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "task.values[" + std::to_string(i) + "]";
      values.push_back(is_alpha ? parse_angle(arr[i], path) : expect_number(arr[i], path));
    }
    return values;
  }
  if (!j.contains("start") || !j.contains("stop"))
    throw ConfigError("config: sweep task needs either values or start/stop");
  const double start = is_alpha ? parse_angle(j["start"], "task.start")
                                : expect_number(j["start"], "task.start");
  const double stop = is_alpha ? parse_angle(j["stop"], "task.stop")
                               : expect_number(j["stop"], "task.stop");
  double step = is_alpha ? std::numbers::pi / 180.0 : 5e-3;  // default grids
  if (j.contains("step")) step = expect_number(j["step"], "task.step");
  if (!(step > 0.0) || !(stop >= start))
    throw ConfigError("config: sweep range must have stop >= start and step > 0");
  for (double v = start; v <= stop + 0.5 * step; v += step) values.push_back(v);
  return values;
}

TaskConfig parse_task(const json& j, const std::string& command) {
  TaskConfig t;
  if (command == "metrics") {
    if (j.is_null()) return t;
    expect_object(j, "task");
    expect_keys(j, "task", {"target"});
    if (j.contains("target")) t.target = expect_string(j["target"], "task.target");
    if (t.target != "hadamard" && t.target != "identity")
      throw ConfigError("config: task.target must be 'hadamard' or 'identity'");
    return t;
  }
  if (command == "sweep") {
    if (j.is_null()) throw ConfigError("config: sweep requires a task block with an axis");
    expect_object(j, "task");
    expect_keys(j, "task", {"axis", "values", "start", "stop", "step"});
    if (!j.contains("axis")) throw ConfigError("config: task.axis is required for sweep");
    t.axis = expect_string(j["axis"], "task.axis");
    if (t.axis != "B" && t.axis != "alpha" && t.axis != "theta")
      throw ConfigError("config: task.axis must be one of 'B', 'alpha', 'theta'");
    const auto values = resolve_axis_values(j, t.axis);
    if (values.empty()) throw ConfigError("config: sweep axis resolved to no values");
    if (t.axis == "B") {
      for (double v : values) {
        const int b = static_cast<int>(std::lround(v));
        if (std::abs(v - b) > 1e-9 || b < 2 || b % 2 != 0)
          throw ConfigError("config: B sweep values must be even integers >= 2");
        t.b_values.push_back(b);
      }
    } else {
      t.axis_values = values;
    }
    return t;
  }
  if (command == "optimize") {
    if (j.is_null()) return t;
    expect_object(j, "task");
    expect_keys(j, "task", {"bracket", "objective", "alpha_bracket"});
    if (j.contains("bracket")) {
      const auto& arr = j["bracket"];
      if (!arr.is_array() || arr.size() != 2)
        throw ConfigError("config: task.bracket must be [lo, hi]");
      t.bracket = {expect_number(arr[0], "task.bracket[0]"),
                   expect_number(arr[1], "task.bracket[1]")};
    }
    if (j.contains("objective")) {
      t.objective = expect_string(j["objective"], "task.objective");
      if (t.objective != "fidelity" && t.objective != "fidelity_times_success")
        throw ConfigError("config: task.objective must be 'fidelity' or 'fidelity_times_success'");
    }
    if (j.contains("alpha_bracket")) {
      const auto& arr = j["alpha_bracket"];
      if (!arr.is_array() || arr.size() != 2)
        throw ConfigError("config: task.alpha_bracket must be [lo, hi]");
      t.alpha_bracket = {{parse_angle(arr[0], "task.alpha_bracket[0]"),
                          parse_angle(arr[1], "task.alpha_bracket[1]")}};
    }
    return t;
  }
  // probe: all parameters live in the probe block
  if (!j.is_null()) {
    expect_object(j, "task");
    expect_keys(j, "task", {});
  }
  return t;
}

NumericsConfig parse_numerics(const json& j) {
  NumericsConfig n;
  if (j.is_null()) return n;
  expect_object(j, "numerics");
  expect_keys(j, "numerics", {"tail_tol"});
  if (j.contains("tail_tol")) n.tail_tol = expect_number(j["tail_tol"], "numerics.tail_tol");
  if (!(n.tail_tol > 0.0) || n.tail_tol > 1e-3)
    throw ConfigError("config: numerics.tail_tol must lie in (0, 1e-3]");
  return n;
}

ProbeConfig parse_probe(const json& j) {
  ProbeConfig p;
  if (j.is_null()) return p;
  expect_object(j, "probe");
  expect_keys(j, "probe",
              {"replicates", "loss", "sigma", "sigma_common", "phase_points", "phase_grid",
               "phi_i", "seed"});
  if (j.contains("replicates")) p.replicates = expect_int(j["replicates"], "probe.replicates");
  if (j.contains("loss")) p.loss = expect_number(j["loss"], "probe.loss");
  if (j.contains("sigma")) p.sigma = expect_number(j["sigma"], "probe.sigma");
  if (j.contains("sigma_common"))
    p.sigma_common = expect_number(j["sigma_common"], "probe.sigma_common");
  if (j.contains("phase_points") && j.contains("phase_grid"))
    throw ConfigError("config: probe.phase_points and probe.phase_grid are mutually exclusive");
  if (j.contains("phase_points")) {
    const int n = expect_int(j["phase_points"], "probe.phase_points");
    if (n < 8) throw ConfigError("config: probe.phase_points must be >= 8");
    p.phase_grid = ProbeConfig::uniform_grid(n);
  }
  if (j.contains("phase_grid")) {
    const auto& arr = j["phase_grid"];
    if (!arr.is_array()) throw ConfigError("config: probe.phase_grid must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      p.phase_grid.push_back(parse_angle(arr[i], "probe.phase_grid[" + std::to_string(i) + "]"));
  }
  if (j.contains("phi_i")) p.phi_i = parse_angle(j["phi_i"], "probe.phi_i");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      throw ConfigError("config: probe.seed must be a non-negative integer");
    p.rng_seed = j["seed"].get<std::uint64_t>();
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: probe: ") + e.what());
  }
  return p;
}

OutputConfig parse_output(const json& j, const std::string& command) {
  OutputConfig o;
  if (j.is_null()) return o;
  expect_object(j, "output");
  expect_keys(j, "output", {"format", "path", "precision"});
  if (j.contains("format")) o.format = expect_string(j["format"], "output.format");
  if (o.format != "json" && o.format != "csv")
    throw ConfigError("config: output.format must be 'json' or 'csv'");
  if (o.format == "csv" && command != "sweep")
    throw ConfigError("config: output.format 'csv' is only available for sweep");
  if (j.contains("path")) o.path = expect_string(j["path"], "output.path");
  if (j.contains("precision")) o.precision = expect_int(j["precision"], "output.precision");
  if (o.precision < 0 || o.precision > 17)
    throw ConfigError("config: output.precision must lie in [0, 17]");
  return o;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::string& command) {
  if (!doc.is_object()) throw ConfigError("config: document root must be an object");
  expect_keys(doc, "$", {"schema", "device", "task", "numerics", "probe", "output"});
  if (doc.contains("schema")) {
    const std::string schema = expect_string(doc["schema"], "schema");
    if (schema != "qfp.config/1")
      throw ConfigError("config: unsupported schema '" + schema + "' (expected qfp.config/1)");
  }

  RunConfig cfg;
  cfg.command = command;
  cfg.device = parse_device(doc.contains("device") ? doc["device"] : json());
  cfg.task = parse_task(doc.contains("task") ? doc["task"] : json(), command);
  cfg.numerics = parse_numerics(doc.contains("numerics") ? doc["numerics"] : json());
  cfg.probe = parse_probe(doc.contains("probe") ? doc["probe"] : json());
  cfg.output = parse_output(doc.contains("output") ? doc["output"] : json(), command);

  if (command == "sweep" || command == "optimize") {
    if (!cfg.device.canonical())
      throw ConfigError("config: " + command + " requires the canonical device (device.alpha)");
    if (cfg.device.theta1 != cfg.device.theta2)
      throw ConfigError("config: " + command + " requires a common modulation index");
    if (cfg.device.signs != std::array<int, 2>{-1, +1})
      throw ConfigError("config: " + command + " requires the out-of-phase sign pair [-1, 1]");
    if (!cfg.device.amplitudes.empty()) {
      for (double a : cfg.device.amplitudes)
        if (a != 1.0)
          throw ConfigError("config: " + command + " requires unit channel amplitudes");
    }
  }
  return cfg;
}

json echo_config(const RunConfig& cfg) {
  json device;
  device["channels"] = cfg.device.channels;
  if (cfg.device.canonical())
    device["alpha"] = *cfg.device.alpha;
  else
    device["phases"] = cfg.device.phases;
  device["amplitudes"] = cfg.device.amplitudes.empty()
                             ? std::vector<double>(cfg.device.channels, 1.0)
                             : cfg.device.amplitudes;
  device["theta1"] = cfg.device.theta1;
  device["theta2"] = cfg.device.theta2;
  device["signs"] = cfg.device.signs;
  device["bin_spacing_ghz"] = cfg.device.bin_spacing_ghz;
  device["n"] = cfg.device.n_inputs;

  json task;
  if (cfg.command == "metrics") {
    task["target"] = cfg.task.target;
  } else if (cfg.command == "sweep") {
    task["axis"] = cfg.task.axis;
    if (cfg.task.axis == "B")
      task["values"] = cfg.task.b_values;
    else
      task["values"] = cfg.task.axis_values;
  } else if (cfg.command == "optimize") {
    task["bracket"] = cfg.task.bracket;
    task["objective"] = cfg.task.objective;
    if (cfg.task.alpha_bracket) task["alpha_bracket"] = *cfg.task.alpha_bracket;
  } else {
    task = json::object();
  }

  json probe;
  probe["replicates"] = cfg.probe.replicates;
  probe["loss"] = cfg.probe.loss;
  probe["sigma"] = cfg.probe.sigma;
  probe["sigma_common"] = cfg.probe.sigma_common;
  probe["phase_grid"] = cfg.probe.resolved_grid();
  probe["phi_i"] = cfg.probe.phi_i;
  probe["seed"] = cfg.probe.rng_seed;

  json out;
  out["schema"] = "qfp.config/1";
  out["device"] = device;
  out["task"] = task;
  out["numerics"] = json{{"tail_tol", cfg.numerics.tail_tol}};
  out["probe"] = probe;
  out["output"] = json{{"format", cfg.output.format},
                       {"path", cfg.output.path},
                       {"precision", cfg.output.precision}};
  return out;
}

}  // namespace qfp::cli
