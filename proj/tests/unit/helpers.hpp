#pragma once

#include "tho/candidate_set.hpp"
#include "tho/rng.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <string>
#include <vector>

namespace tho::testing {

inline Density uniform(double lo, double hi) {
  return Density(ParametricEstimate(ParametricFamily::uniform, lo, hi));
}

inline Histogram step_histogram(std::vector<double> breaks, std::vector<double> masses) {
  return Histogram(Eigen::Map<Eigen::VectorXd>(breaks.data(), static_cast<Eigen::Index>(breaks.size())),
                   Eigen::Map<Eigen::VectorXd>(masses.data(), static_cast<Eigen::Index>(masses.size())));
}

/// Histogram with random breaks in [lo, hi] and random masses.
inline Histogram random_histogram(Rng& rng, double lo, double hi, int max_bins = 8) {
  const int bins = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_bins)));
  std::vector<double> inner;
  for (int k = 0; k < bins - 1; ++k) inner.push_back(lo + (hi - lo) * rng.uniform());
  std::sort(inner.begin(), inner.end());
  Eigen::VectorXd breaks(bins + 1);
  breaks(0) = lo;
  for (int k = 0; k < bins - 1; ++k) breaks(k + 1) = inner[static_cast<std::size_t>(k)];
  breaks(bins) = hi;
  Eigen::VectorXd masses(bins);
  for (int k = 0; k < bins; ++k) masses(k) = 0.05 + rng.uniform();
  masses /= masses.sum();
  return Histogram(breaks, masses);
}

inline std::vector<Candidate> as_candidates(const std::vector<Density>& ds) {
  std::vector<Candidate> out;
  for (std::size_t k = 0; k < ds.size(); ++k) out.push_back({ds[k], "c" + std::to_string(k + 1), {}});
  return out;
}

inline Eigen::VectorXd normal_sample(Rng& rng, Eigen::Index n, double mean = 0.0, double sd = 1.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = mean + sd * rng.normal();
  return x;
}

inline Eigen::VectorXd vec(std::vector<double> v) {
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace tho::testing
