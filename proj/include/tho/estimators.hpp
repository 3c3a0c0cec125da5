#pragma once

#include "tho/density.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tho {

/// Raised when a sample cannot support the requested family (e.g. all values equal).
class DegenerateSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FamilyTag { SR, SI, SK, SP, SC, S1, S2 };

std::string to_string(FamilyTag tag);
FamilyTag family_from_string(const std::string& name);

/// Number of members of the regular-histogram and kernel families: ceil(n1 / ln n1).
int family_size(Eigen::Index n1);

/// How a candidate was built, so the same recipe can be refitted on another sample.
struct Recipe {
  enum class Kind { regular_histogram, irregular_histogram, kernel, parametric };
  Kind kind = Kind::regular_histogram;
  int index = 1;  ///< bin count D, or kernel index j (bandwidth = range / 2j)
  ParametricFamily family = ParametricFamily::gaussian;
};

std::string to_string(Recipe::Kind kind);

struct Candidate {
  Density density;
  std::string label;
  Recipe recipe;
};

/// Equal-width histogram with D bins on [min x, max x]; x sorted or not.
Histogram regular_histogram(const Eigen::VectorXd& x, int bins);

/// Regular histograms for D = 1 .. ceil(n1 / ln n1).
std::vector<Histogram> fit_regular_histograms(const Eigen::VectorXd& x);

/// Finite set of admissible breakpoints for irregular histograms: min, max and
/// up to `max_interior` midpoints between consecutive distinct observations.
Eigen::VectorXd irregular_candidate_grid(const Eigen::VectorXd& sorted_x, int max_interior = 300);

/// Maximum-likelihood partition of a grid into D cells.
struct BestPartition {
  Eigen::VectorXd breaks;
  double log_likelihood = 0.0;
};

/// Dynamic programme over grid cells; entry D-1 holds the best D-cell partition,
/// for D = 1 .. min(max_bins, grid cells).
std::vector<BestPartition> best_partitions(const Eigen::VectorXd& sorted_x, const Eigen::VectorXd& grid,
                                           int max_bins);

/// Log-likelihood of the histogram with the given breaks and ML masses.
double partition_log_likelihood(const Eigen::VectorXd& sorted_x, const Eigen::VectorXd& breaks);

/// ML irregular histograms for D = 1 .. min(100, ceil(n1 / ln n1)), truncated when the grid is too coarse.
std::vector<Histogram> fit_irregular_histograms(const Eigen::VectorXd& x);
Histogram irregular_histogram(const Eigen::VectorXd& x, int bins);

/// Gaussian kernel estimates with bandwidth (max - min) / 2j, j = 1 .. ceil(n1 / ln n1).
std::vector<KernelEstimate> fit_kernel_estimates(const Eigen::VectorXd& x);
double kernel_bandwidth(const Eigen::VectorXd& x, int j);

/// Method-of-moments fit of one family; empty when the data lie outside the family's domain.
std::optional<ParametricEstimate> fit_parametric(const Eigen::VectorXd& x, ParametricFamily family);

/// All feasible parametric fits in the order gaussian, exponential, lognormal,
/// chisquare, gamma, beta, uniform.
std::vector<ParametricEstimate> fit_parametric(const Eigen::VectorXd& x);

/// Candidates of a family in the order SR, SI, SK, SP (restricted to the tag).
std::vector<Candidate> build_candidates(FamilyTag tag, const Eigen::VectorXd& x);

/// Rebuilds a recipe on another sample. Throws DegenerateSampleError when infeasible.
Density refit(const Recipe& recipe, const Eigen::VectorXd& x);

}  // namespace tho
