#pragma once

#include "tho/estimators.hpp"
#include "tho/quadrature.hpp"
#include "tho/reference_densities.hpp"
#include "tho/robust_tests.hpp"
#include "tho/selector.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tho {

enum class Loss { hellinger2, l1, l2 };

std::string to_string(Loss loss);
Loss loss_from_string(const std::string& name);

/// Distance between an estimate and the true density under the given loss.
double loss_value(Loss loss, const Density& estimate, const Density& truth, const QuadratureSpec& quad = {});

/// Whether the final estimate is the selected candidate or its recipe refitted on the whole sample.
enum class Last { training, full };

std::string to_string(Last last);
Last last_from_string(const std::string& name);

/// Monte-Carlo campaign: every density x family x sample size, `replicates` times.
struct ExperimentConfig {
  std::vector<std::string> densities;
  std::vector<FamilyTag> families{FamilyTag::S2};
  std::vector<int> sizes{100};
  double p = 0.5;
  TestKind::Variant test = TestKind::Variant::birge;
  double theta = 0.25;
  std::vector<Method> methods{Method::exact};
  double c = 1.0;  ///< approx radius scale
  int replicates = 1;
  std::vector<Loss> losses{Loss::hellinger2};
  Last last = Last::full;
  std::uint64_t seed = 1;
  Method baseline = Method::exact;  ///< reference method of the risk ratios
  int threads = 0;                  ///< 0: hardware concurrency
  QuadratureSpec quad;

  /// Throws std::invalid_argument on out-of-domain values.
  void validate() const;
  TestKind test_kind() const;
};

/// One method applied to one replicate.
struct RunRecord {
  std::string density;
  FamilyTag family = FamilyTag::S2;
  int n = 0;
  int replicate = 0;
  Method method = Method::exact;
  std::uint64_t seed = 0;
  Eigen::Index members = 0;
  Eigen::Index chosen = 0;
  std::string chosen_label;
  double criterion = 0.0;
  std::size_t tests_used = 0;
  double complexity = 0.0;
  std::vector<double> losses;  ///< aligned with ExperimentConfig::losses
  double wall_ms = 0.0;
  bool refit_fallback = false;  ///< recipe could not be refitted on the full sample
  bool contrast_fallback = false;
};

struct RunFailure {
  std::string density;
  FamilyTag family = FamilyTag::S2;
  int n = 0;
  int replicate = 0;
  std::string message;
};

struct RiskReport {
  ExperimentConfig config;
  std::vector<RunRecord> runs;  ///< ordered by cell, replicate, then method
  std::vector<RunFailure> failures;
};

/// Seed of replicate r of a cell, independent of execution order.
std::uint64_t replicate_seed(std::uint64_t master, const std::string& density, FamilyTag family, int n,
                             int replicate);

/// Runs every requested method on one replicate. Throws on failure.
std::vector<RunRecord> run_replicate(const ExperimentConfig& cfg, const BenchmarkDensity& truth, FamilyTag family,
                                     int n, int replicate);

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Runs the whole campaign on cfg.threads workers. Failed replicates are
/// recorded and skipped; the result does not depend on the thread count.
RiskReport run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

/// Mean loss.
double empirical_risk(const std::vector<double>& losses);

struct LogRatio {
  double value = 0.0;
  bool sentinel = false;  ///< a risk was zero; value is +-inf (or 0 when both were)
};

/// (1/r) log2(r1 / r2), r = 1 for l1 and 2 for l2 and hellinger2.
LogRatio normalized_log2_ratio(double r1, double r2, Loss loss);

/// OLS slope of mean log N against log(M - 1). Needs at least three distinct M.
double complexity_slope(const std::vector<std::pair<Eigen::Index, double>>& samples);

/// Order statistic at 0-based position ceil(q n) of the sorted values, clamped to the last one.
double type1_quantile(std::vector<double> values, double q);

// Aggregates ---------------------------------------------------------------

struct CellRisk {
  std::string density;
  FamilyTag family = FamilyTag::S2;
  int n = 0;
  Method method = Method::exact;
  Loss loss = Loss::hellinger2;
  double risk = 0.0;
  std::size_t replicates = 0;
};

std::vector<CellRisk> cell_risks(const RiskReport& report);

struct RiskRatio {
  std::string density;
  FamilyTag family = FamilyTag::S2;
  int n = 0;
  Method method = Method::exact;
  Loss loss = Loss::hellinger2;
  LogRatio ratio;  ///< W(method, baseline); positive favours the baseline
};

std::vector<RiskRatio> risk_ratios(const RiskReport& report, Method baseline);

inline constexpr std::array<double, 3> kComplexityLevels{0.75, 0.9, 0.95};

struct ComplexitySummary {
  FamilyTag family = FamilyTag::S2;
  int n = 0;
  Method method = Method::exact;
  std::size_t count = 0;
  double median = 0.0;
  std::array<double, 3> quantiles{};  ///< at kComplexityLevels
};

/// Per (family, n, method) over all densities and replicates; test-based methods only.
std::vector<ComplexitySummary> complexity_summaries(const RiskReport& report);

struct SlopeEntry {
  std::string density;
  FamilyTag family = FamilyTag::S2;
  Method method = Method::exact;
  std::size_t distinct_sizes = 0;
  std::optional<double> slope;  ///< empty when fewer than three distinct M
};

std::vector<SlopeEntry> complexity_slopes(const std::vector<RunRecord>& runs);

struct OracleCheck {
  std::size_t compared = 0;
  std::size_t disagreements = 0;
};

/// Compares exact and brute records of the same replicate.
OracleCheck oracle_check(const RiskReport& report);

}  // namespace tho
