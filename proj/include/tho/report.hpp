#pragma once

#include "tho/bench.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace tho {

/// Shortest round-tripping decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double value);

inline const char* const kRunsCsvHeader =
    "density,family,n,p,theta,test,method,c,last,replicate,loss_name,loss_value,tests_used,complexity_ratio,"
    "wall_ms,seed";

/// One row per run and loss. Only the wall_ms column varies between identical campaigns.
void write_runs_csv(std::ostream& out, const RiskReport& report);

/// Aggregated results: cell risks, risk ratios against the baseline, complexity
/// quantiles, slopes, the exact/brute cross-check and failures. Non-finite numbers become null.
nlohmann::json summary_json(const RiskReport& report);

/// Campaign file. Keys: densities, families, n, p, test, theta, methods, c,
/// replicates, losses, last, seed, baseline, threads. Missing keys take the
/// ExperimentConfig defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace tho
