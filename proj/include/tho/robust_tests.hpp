#pragma once

#include "tho/candidate_set.hpp"
#include "tho/density.hpp"
#include "tho/quadrature.hpp"

#include <Eigen/Core>

#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tho {

/// Which robust pairwise statistic decides between two candidates.
struct TestKind {
  enum class Variant { birge, baraud };

  Variant variant = Variant::birge;
  double theta = 0.25;  ///< robustness parameter of the Birge statistic

  /// Birge statistic with theta in (0, 1/2).
  static TestKind birge(double theta = 0.25);
  /// Birge statistic at theta = 0, which reduces to half the log-likelihood ratio.
  static TestKind birge_likelihood_ratio();
  static TestKind baraud();

  std::string name() const;
};

TestKind::Variant test_variant_from_string(const std::string& name);

/// Log-term magnitude standing in for +-inf when exactly one density vanishes at a point.
inline constexpr double kSaturatedLogTerm = 1e300;

/// Birge statistic from pdf values of s_i and s_j at the validation points.
///
/// T = sum_k log[(sin(theta w) sqrt s_i + sin((1-theta) w) sqrt s_j) /
///               (sin(theta w) sqrt s_j + sin((1-theta) w) sqrt s_i)](X_k),
/// w = arccos(1 - h2). Terms with both densities zero count 0; a term with
/// exactly one zero side counts +-kSaturatedLogTerm, tallied separately so
/// the result stays finite and exactly antisymmetric.
double birge_statistic(const Eigen::Ref<const Eigen::VectorXd>& f_i,
                       const Eigen::Ref<const Eigen::VectorXd>& f_j, double theta, double h2);

double birge_statistic(const Density& s_i, const Density& s_j, const Eigen::VectorXd& validation,
                       double theta, double h2);

/// Empirical part of the Baraud statistic: mean of (sqrt s_j - sqrt s_i) / sqrt r,
/// r = (s_i + s_j) / 2, with points where r = 0 contributing 0.
double baraud_empirical_term(const Eigen::Ref<const Eigen::VectorXd>& f_i,
                             const Eigen::Ref<const Eigen::VectorXd>& f_j);

/// h^2(s_i, r) - h^2(s_j, r) on grid values.
double baraud_deterministic_term(const Eigen::Ref<const Eigen::VectorXd>& weights,
                                 const Eigen::Ref<const Eigen::VectorXd>& f_i,
                                 const Eigen::Ref<const Eigen::VectorXd>& f_j);

/// Exact h^2(s_i, r) - h^2(s_j, r) for a histogram pair.
double baraud_deterministic_term(const Histogram& s_i, const Histogram& s_j);

/// T = h^2(s_i, r) - h^2(s_j, r) + mean_k (sqrt s_j - sqrt s_i) / sqrt r (X_k).
double baraud_statistic(const Density& s_i, const Density& s_j, const Eigen::VectorXd& validation,
                        const QuadratureSpec& quad = {});

/// Outcome of one robust test; i < j.
struct PairDecision {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double statistic = 0.0;
  Eigen::Index winner = 0;
  double distance = 0.0;  ///< Hellinger distance h(i, j)
};

/// Decisions per unordered pair; each pair is stored once, first writer wins.
class TestCache {
 public:
  explicit TestCache(Eigen::Index members);

  std::optional<PairDecision> find(Eigen::Index i, Eigen::Index j) const;
  /// Stores the decision unless the pair is already present; returns the stored one.
  PairDecision insert(const PairDecision& decision);
  /// Number of distinct pairs tested so far.
  std::size_t count() const;

 private:
  std::size_t slot(Eigen::Index i, Eigen::Index j) const;

  Eigen::Index members_;
  mutable std::mutex mutex_;
  std::vector<std::optional<PairDecision>> slots_;
  std::size_t count_ = 0;
};

/// Runs cached robust tests between members of a candidate set on a validation sample.
class PairwiseTester {
 public:
  PairwiseTester(const CandidateSet& candidates, Eigen::VectorXd validation, TestKind kind);
  /// Reuses member values already computed at the sorted validation points.
  PairwiseTester(const CandidateSet& candidates, Eigen::VectorXd sorted_validation, Eigen::MatrixXd values,
                 TestKind kind);

  /// Test decision between i and j: canonicalises to (min, max), tests once, caches. Ties (T = 0 or h = 0) go to the lower index.
  PairDecision decide(Eigen::Index i, Eigen::Index j);
  /// T_{i,j} in the given orientation, uncached and not counted.
  double statistic(Eigen::Index i, Eigen::Index j) const;

  double distance(Eigen::Index i, Eigen::Index j) const { return candidates_.hellinger(i, j); }
  Eigen::Index size() const { return candidates_.size(); }
  std::size_t tests_used() const { return cache_.count(); }
  const CandidateSet& candidates() const { return candidates_; }
  const Eigen::VectorXd& validation() const { return validation_; }
  const TestKind& kind() const { return kind_; }
  /// Member pdf values at the validation points (one column per member).
  const Eigen::MatrixXd& validation_values() const { return values_; }

 private:
  const CandidateSet& candidates_;
  Eigen::VectorXd validation_;
  TestKind kind_;
  Eigen::MatrixXd values_;
  TestCache cache_;
};

/// Free-function form of PairwiseTester::decide.
inline PairDecision decide(Eigen::Index i, Eigen::Index j, PairwiseTester& tester) {
  return tester.decide(i, j);
}

}  // namespace tho
