#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace tho {

/// Random partition of a sample into training and validation parts.
struct SampleSplit {
  Eigen::VectorXd full;        ///< sorted
  Eigen::VectorXd training;    ///< sorted, floor(p n) points
  Eigen::VectorXd validation;  ///< sorted, the remaining points
  double p = 0.5;
  std::uint64_t seed = 0;
};

/// Size of the training part: the integer part of p n.
Eigen::Index training_size(Eigen::Index n, double p);

/// Seeded uniform partition with |training| = floor(p n).
/// Throws std::invalid_argument when n < 4, p is outside (0, 1) or either part would be empty.
SampleSplit split_sample(const Eigen::VectorXd& x, double p, std::uint64_t seed);

}  // namespace tho
