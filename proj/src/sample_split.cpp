#include "tho/sample_split.hpp"

#include "tho/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tho {

Eigen::Index training_size(Eigen::Index n, double p) {
  return static_cast<Eigen::Index>(std::floor(p * static_cast<double>(n)));
}

SampleSplit split_sample(const Eigen::VectorXd& x, double p, std::uint64_t seed) {
  const Eigen::Index n = x.size();
  if (n < 4) throw std::invalid_argument("split_sample needs at least 4 observations");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("split proportion must lie in (0, 1)");
  if (!x.allFinite()) throw std::invalid_argument("sample contains non-finite values");
  const Eigen::Index n1 = training_size(n, p);
  if (n1 < 1 || n1 > n - 1) throw std::invalid_argument("split leaves an empty training or validation part");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  SampleSplit s;
  s.p = p;
  s.seed = seed;
  s.full = x;
  std::sort(s.full.begin(), s.full.end());
  s.training.resize(n1);
  s.validation.resize(n - n1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = x(order[static_cast<std::size_t>(k)]);
    if (k < n1) {
      s.training(k) = v;
    } else {
      s.validation(k - n1) = v;
    }
  }
  std::sort(s.training.begin(), s.training.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

}  // namespace tho
