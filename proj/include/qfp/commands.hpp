#pragma once

#include "qfp/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qfp::cli {

/// Exit codes: 0 success, 2 configuration error, 3 numeric/degenerate error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

json run_metrics(const RunConfig& cfg);
json run_sweep(const RunConfig& cfg, int threads = 1);
json run_optimize(const RunConfig& cfg);
json run_probe(const RunConfig& cfg);

/// CSV rendering of a sweep report (LF line endings, '.' decimals).
std::string sweep_csv(const json& report, int precision);

/// Full command-line entry point; writes results to `out` or to the
/// configured path, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfp::cli
