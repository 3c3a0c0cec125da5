#pragma once

#include "tho/candidate_set.hpp"
#include "tho/robust_tests.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace tho {

enum class Method { exact, approx, brute, ls, kl };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct TraceStep {
  Eigen::Index m = 0;
  double criterion = 0.0;
};

struct SelectionOutcome {
  Method method = Method::exact;
  Eigen::Index chosen = 0;  ///< 0-based index into the candidate set
  /// D(chosen) for the test-based methods; the empirical contrast for ls / kl.
  double criterion = 0.0;
  std::size_t tests_used = 0;
  double complexity = 0.0;
  /// Initial point, then every replacement that strictly lowered the running D.
  std::vector<TraceStep> trace;
  double delta = 0.0;     ///< skip radius of the approximate search
  bool fallback = false;  ///< kl fell back to ls because every candidate had infinite contrast
};

/// 2(N - M + 1) / ((M - 1)(M - 2)); 0 when M <= 2.
double complexity_ratio(std::size_t tests, Eigen::Index members);

/// Largest distance from m to a candidate that beats m; 0 if none does.
double crit_D(Eigen::Index m, PairwiseTester& tester);

/// Tests every pair and returns the lowest-index minimiser of D.
SelectionOutcome brute_force_select(PairwiseTester& tester);

/// Ball-intersection search. Returns the same point as brute_force_select
/// (lowest-index minimiser of D), usually after far fewer tests.
SelectionOutcome exact_select(PairwiseTester& tester, Eigen::Index start);

/// Lossy variant: candidates within c / sqrt(|validation|) of an already
/// examined point are not tested.
SelectionOutcome approx_select(PairwiseTester& tester, Eigen::Index start, double c = 1.0);

enum class Contrast { ls, kl };

/// Classical hold-out with the least-squares or Kullback-Leibler contrast.
/// `values` holds the members' pdf values at the validation points, one column per member.
SelectionOutcome classical_ho_select(const CandidateSet& candidates, const Eigen::MatrixXd& values,
                                     Contrast contrast);
SelectionOutcome classical_ho_select(const CandidateSet& candidates, const Eigen::VectorXd& validation,
                                     Contrast contrast);

/// Empirical contrast of every member; +inf where undefined.
Eigen::VectorXd ho_criteria(const CandidateSet& candidates, const Eigen::MatrixXd& values, Contrast contrast);

}  // namespace tho
