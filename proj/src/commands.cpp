#include "qfp/commands.hpp"

#include "qfp/design.hpp"
#include "qfp/metrics.hpp"
#include "qfp/probe.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace qfp::cli {

namespace {

// Decimal rounding through the formatted representation, so reported metrics
// carry exactly `precision` places.
double round_decimals(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, x);
  return std::strtod(buf, nullptr);
}

ShaperSpec make_shaper(const DeviceConfig& d) {
  if (d.canonical()) {
    ShaperSpec s = ShaperSpec::step_phase(d.channels, *d.alpha, d.bin_spacing_ghz);
    if (!d.amplitudes.empty())
      s.amplitudes = Eigen::Map<const Eigen::ArrayXd>(d.amplitudes.data(), d.channels);
    return s;
  }
  ShaperSpec s;
  s.channel_count = d.channels;
  s.bin_spacing_ghz = d.bin_spacing_ghz;
  s.phases = Eigen::Map<const Eigen::ArrayXd>(d.phases.data(), d.channels);
  s.amplitudes = d.amplitudes.empty()
                     ? Eigen::ArrayXd::Ones(d.channels).eval()
                     : Eigen::Map<const Eigen::ArrayXd>(d.amplitudes.data(), d.channels).eval();
  return s;
}

TransferMatrix device_transfer(const RunConfig& cfg) {
  return build_transfer(ModulatorSpec{cfg.device.theta1, cfg.device.signs[0]}, make_shaper(cfg.device),
                        ModulatorSpec{cfg.device.theta2, cfg.device.signs[1]},
                        cfg.device.n_inputs, cfg.numerics.tail_tol);
}

Eigen::MatrixXcd target_matrix(const std::string& name) {
  if (name == "identity") return Eigen::Matrix2cd::Identity();
  return hadamard_target();
}

json w_as_pairs(const Eigen::MatrixXcd& w) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      row.push_back(json::array({w(r, c).real(), w(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

json metrics_fields(const GateMetrics& g, const SplitterRatios& r, int precision) {
  json j;
  j["fidelity"] = round_decimals(g.fidelity, precision);
  j["success"] = round_decimals(g.success, precision);
  j["modified_success"] = round_decimals(g.modified_success, precision);
  j["eta"] = round_decimals(g.eta, precision);
  j["r_0to1"] = round_decimals(r.r_0to1, precision);
  j["r_1to0"] = round_decimals(r.r_1to0, precision);
  j["t_0to0"] = round_decimals(r.t_0to0, precision);
  j["t_1to1"] = round_decimals(r.t_1to1, precision);
  return j;
}

}  // namespace

json run_metrics(const RunConfig& cfg) {
  const TransferMatrix v = device_transfer(cfg);
  const GateMetrics g = gate_metrics(v, target_matrix(cfg.task.target));
  const SplitterRatios r = splitter_ratios(g.w);

  json result = metrics_fields(g, r, cfg.output.precision);
  result["target"] = cfg.task.target;
  result["w"] = w_as_pairs(g.w);
  result["window"] = json{{"m_min", v.m_min}, {"m_max", v.m_max}};

  json report;
  report["schema"] = "qfp.metrics/1";
  report["config"] = echo_config(cfg);
  report["result"] = result;
  return report;
}

json run_sweep(const RunConfig& cfg, int threads) {
  const auto& d = cfg.device;
  SweepResult sweep;
  if (cfg.task.axis == "B") {
    sweep = sweep_channels(*d.alpha, d.theta1, cfg.task.b_values, d.n_inputs,
                           cfg.numerics.tail_tol, threads);
  } else if (cfg.task.axis == "alpha") {
    sweep = sweep_alpha(d.channels, d.theta1, cfg.task.axis_values, d.n_inputs,
                        cfg.numerics.tail_tol, threads);
  } else {
    sweep = sweep_theta(d.channels, *d.alpha, cfg.task.axis_values, d.n_inputs,
                        cfg.numerics.tail_tol, threads);
  }

  json fixed;
  if (cfg.task.axis != "B") fixed["channels"] = sweep.fixed.channels;
  if (cfg.task.axis != "alpha") fixed["alpha"] = sweep.fixed.alpha;
  if (cfg.task.axis != "theta") fixed["theta"] = sweep.fixed.theta;
  fixed["n"] = sweep.fixed.n_inputs;
  fixed["tail_tol"] = sweep.fixed.tail_tol;

  json points = json::array();
  for (const auto& p : sweep.points) {
    json row = metrics_fields(p.metrics, p.ratios, cfg.output.precision);
    row["axis_value"] = p.axis_value;
    points.push_back(std::move(row));
  }

  json report;
  report["schema"] = "qfp.sweep/1";
  report["config"] = echo_config(cfg);
  report["result"] = json{{"axis", sweep.axis_name}, {"fixed", fixed}, {"points", points}};
  return report;
}

json run_optimize(const RunConfig& cfg) {
  const auto& d = cfg.device;
  const DesignObjective objective = cfg.task.objective == "fidelity"
                                        ? DesignObjective::kFidelity
                                        : DesignObjective::kFidelityTimesSuccess;
  OptimumReport r;
  if (cfg.task.alpha_bracket) {
    r = optimize_joint(d.channels, (*cfg.task.alpha_bracket)[0], (*cfg.task.alpha_bracket)[1],
                       cfg.task.bracket[0], cfg.task.bracket[1], objective,
                       cfg.numerics.tail_tol);
  } else {
    r = optimize_hadamard(d.channels, *d.alpha, cfg.task.bracket[0], cfg.task.bracket[1],
                          objective, cfg.numerics.tail_tol);
  }

  const SplitterRatios ratios = splitter_ratios(r.metrics.w);
  json result;
  result["objective"] = cfg.task.objective;
  result["theta_star"] = r.theta_star;
  result["alpha_star"] = r.alpha_star;
  result["metrics"] = metrics_fields(r.metrics, ratios, cfg.output.precision);
  result["iterations"] = r.iterations;
  result["flat_objective"] = r.flat_objective;
  result["grid_check"] =
      json{{"step", r.grid_step}, {"theta", r.grid_theta}, {"value", r.grid_value}};
  json trace = json::array();
  for (const auto& s : r.trace)
    trace.push_back(json{{"lower", s.lower}, {"upper", s.upper}, {"theta", s.theta},
                         {"value", s.value}});
  result["trace"] = trace;

  json report;
  report["schema"] = "qfp.optimize/1";
  report["config"] = echo_config(cfg);
  report["result"] = result;
  return report;
}

json run_probe(const RunConfig& cfg) {
  const TransferMatrix v = device_transfer(cfg);
  const ProbeDataset ds = simulate_probe(v, cfg.probe);
  const Reconstruction rec = reconstruct(ds);

  json dataset;
  dataset["replicates"] = ds.replicates;
  dataset["window"] = json{{"m_min", ds.single_line.m_min}, {"m_max", ds.single_line.m_max}};
  json single = json::array();
  for (int n = 0; n < 2; ++n) {
    json block;
    block["input"] = n;
    json rows = json::array();
    for (int rep = 0; rep < ds.replicates; ++rep) {
      json row = json::array();
      for (int i = 0; i < ds.single_line.powers[n].cols(); ++i)
        row.push_back(ds.single_line.powers[n](rep, i));
      rows.push_back(std::move(row));
    }
    block["powers"] = rows;
    block["totals"] = std::vector<double>(ds.single_line.totals[n].begin(),
                                          ds.single_line.totals[n].end());
    single.push_back(std::move(block));
  }
  dataset["single_line"] = single;

  json dual;
  dual["phase_grid"] = ds.dual_line.phase_grid;
  auto matrix_rows = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  dual["rho0"] = matrix_rows(ds.dual_line.rho0);
  dual["rho1"] = matrix_rows(ds.dual_line.rho1);
  dual["totals"] = matrix_rows(ds.dual_line.totals);
  dataset["dual_line"] = dual;

  json recon;
  recon["gamma"] = json::array({json::array({rec.gamma(0, 0), rec.gamma(0, 1)}),
                                json::array({rec.gamma(1, 0), rec.gamma(1, 1)})});
  recon["phi11"] = rec.phi11;
  recon["phi_i_fit"] = rec.phi_i_fit;
  json cov = json::array();
  for (int r = 0; r < 5; ++r) {
    json row = json::array();
    for (int c = 0; c < 5; ++c) row.push_back(rec.covariance(r, c));
    cov.push_back(std::move(row));
  }
  recon["covariance"] = cov;
  recon["fidelity"] = rec.fidelity;
  recon["fidelity_err"] = rec.fidelity_err;
  recon["modified_success"] = rec.modified_success;
  recon["modified_success_err"] = rec.modified_success_err;

  // Simulator ground truth for regression against the direct metrics path.
  const GaugeDecomposition gauge = gauge_fix(computational_submatrix(v));
  const SuccessMetrics s = success(v, computational_submatrix(v));
  json truth;
  truth["fidelity"] = fidelity(gauge_canonical_matrix(gauge.magnitudes, gauge.phi11),
                               hadamard_target());
  truth["modified_success"] = s.modified_success;
  truth["phi11"] = gauge.phi11;

  json report;
  report["schema"] = "qfp.probe/1";
  report["config"] = echo_config(cfg);
  report["dataset"] = dataset;
  report["reconstruction"] = recon;
  report["truth"] = truth;
  return report;
}

std::string sweep_csv(const json& report, int precision) {
  const auto& result = report.at("result");
  const std::string axis = result.at("axis").get<std::string>();

  std::string out = "# fixed:";
  for (const auto& item : result.at("fixed").items()) {
    char buf[96];
    if (item.value().is_number_integer()) {
      std::snprintf(buf, sizeof(buf), " %s=%lld", item.key().c_str(),
                    static_cast<long long>(item.value().get<long long>()));
    } else {
      std::snprintf(buf, sizeof(buf), " %s=%.12g", item.key().c_str(),
                    item.value().get<double>());
    }
    out += buf;
  }
  out += "\n";
  out += axis + ",F,P,P_tilde,eta,R_01,R_10,T_00,T_11\n";

  for (const auto& p : result.at("points")) {
    char buf[320];
    const double axis_value = p.at("axis_value").get<double>();
    if (axis == "B") {
      std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(std::lround(axis_value)));
      out += buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%.10g", axis_value);
      out += buf;
    }
    for (const char* key : {"fidelity", "success", "modified_success", "eta", "r_0to1", "r_1to0",
                            "t_0to0", "t_1to1"}) {
      std::snprintf(buf, sizeof(buf), ",%.*f", precision, p.at(key).get<double>());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

namespace {

void emit(const RunConfig& cfg, const json& report, std::ostream& out) {
  std::string text;
  if (cfg.output.format == "csv")
    text = sweep_csv(report, cfg.output.precision);
  else
    text = report.dump(2) + "\n";

  if (cfg.output.path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output.path, std::ios::binary);
  if (!file) throw ConfigError("output: cannot open '" + cfg.output.path + "' for writing");
  file << text;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-bin processor design and characterization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  int threads = 1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_path, "output path (default: stdout)");
    sub->add_option("--format", format, "output format: json or csv");
    sub->add_option("--seed", seed, "override probe.seed");
    sub->add_option("--threads", threads, "worker threads for sweeps");
  };
  CLI::App* cmd_metrics = app.add_subcommand("metrics", "gate metrics for one configuration");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "sweep B, alpha or theta");
  CLI::App* cmd_optimize = app.add_subcommand("optimize", "search the modulation index");
  CLI::App* cmd_probe = app.add_subcommand("probe", "synthetic coherent-state characterization");
  for (CLI::App* sub : {cmd_metrics, cmd_sweep, cmd_optimize, cmd_probe}) add_common(sub);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 convention
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream file(config_path);
    if (!file) throw ConfigError("config: cannot read '" + config_path + "'");
    json doc;
    try {
      doc = json::parse(file);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    RunConfig cfg = parse_config(doc, command);
    if (!out_path.empty()) cfg.output.path = out_path;
    if (!format.empty()) {
      if (format != "json" && format != "csv")
        throw ConfigError("config: --format must be json or csv");
      if (format == "csv" && command != "sweep")
        throw ConfigError("config: --format csv is only available for sweep");
      cfg.output.format = format;
    }
    if (seed) cfg.probe.rng_seed = *seed;
    if (threads < 1) throw ConfigError("config: --threads must be >= 1");

    json report;
    if (command == "metrics") {
      report = run_metrics(cfg);
    } else if (command == "sweep") {
      report = run_sweep(cfg, threads);
    } else if (command == "optimize") {
      report = run_optimize(cfg);
    } else {
      report = run_probe(cfg);
    }
    emit(cfg, report, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace qfp::cli
