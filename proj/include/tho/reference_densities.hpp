#pragma once

#include "tho/density.hpp"
#include "tho/rng.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace tho {

/// Known density with an exact sampler, used as the truth in simulations.
struct BenchmarkDensity {
  std::string label;
  Density pdf;
  std::function<double(double)> cdf;
  std::function<double(Rng&)> draw;

  Eigen::VectorXd sample(Eigen::Index n, Rng& rng) const;
};

/// The built-in suite: uniform, exponential, normal, lognormal, laplace,
/// cauchy_trunc, beta22, gamma2, chisq1, bimodal, claw3 and steps.
const std::vector<BenchmarkDensity>& builtin_densities();

/// Looks a density up by label; throws std::invalid_argument if unknown.
const BenchmarkDensity& builtin_density(const std::string& label);

}  // namespace tho
