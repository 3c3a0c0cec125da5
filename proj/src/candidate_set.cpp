#include "tho/candidate_set.hpp"

#include "tho/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tho {

namespace {
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
}

CandidateSet::CandidateSet(std::vector<Candidate> members, QuadratureSpec quad)
    : members_(std::move(members)), quad_(quad) {
  if (members_.empty()) throw std::invalid_argument("candidate set must not be empty");
  quad_.validate();
  const Eigen::Index m = size();
  dist_sq_ = Eigen::MatrixXd::Constant(m, m, kUnset);
  dist_sq_.diagonal().setZero();
  l2_sq_ = Eigen::VectorXd::Constant(m, kUnset);
}

bool CandidateSet::histogram_pair(Eigen::Index i, Eigen::Index j) const {
  return density(i).as_histogram() != nullptr && density(j).as_histogram() != nullptr;
}

const SampledGrid& CandidateSet::shared_grid() const {
  std::call_once(grid_once_, [this] {
    std::vector<const Density*> ptrs;
    ptrs.reserve(members_.size());
    for (const auto& c : members_) ptrs.push_back(&c.density);
    grid_ = std::make_unique<SampledGrid>(sample_on_grid(ptrs, quad_));
  });
  return *grid_;
}

double CandidateSet::compute_sq(Eigen::Index i, Eigen::Index j) const {
  if (i == j) return 0.0;
  if (histogram_pair(i, j)) {
    return tho::hellinger_sq(*density(i).as_histogram(), *density(j).as_histogram());
  }
  const SampledGrid& g = shared_grid();
  // Fixed argument order keeps the value identical for (i, j) and (j, i).
  const Eigen::Index a = std::min(i, j);
  const Eigen::Index b = std::max(i, j);
  return std::clamp(hellinger_sq_on_grid(g.grid.weights, g.values.col(a), g.values.col(b)), 0.0, 1.0);
}

double CandidateSet::hellinger_sq(Eigen::Index i, Eigen::Index j) const {
  {
    std::lock_guard lock(mutex_);
    const double cached = dist_sq_(i, j);
    if (!std::isnan(cached)) return cached;
  }
  const double value = compute_sq(i, j);
  std::lock_guard lock(mutex_);
  if (std::isnan(dist_sq_(i, j))) {
    dist_sq_(i, j) = value;
    dist_sq_(j, i) = value;
  }
  return dist_sq_(i, j);
}

double CandidateSet::hellinger(Eigen::Index i, Eigen::Index j) const {
  return std::sqrt(hellinger_sq(i, j));
}

double CandidateSet::sq_l2_norm(Eigen::Index i) const {
  {
    std::lock_guard lock(mutex_);
    if (!std::isnan(l2_sq_(i))) return l2_sq_(i);
  }
  double value = 0.0;
  const Density& d = density(i);
  if (const auto* h = d.as_histogram()) {
    value = tho::sq_l2_norm(*h);
  } else if (!d.square_integrable()) {
    value = kInf;
  } else {
    const SampledGrid& g = shared_grid();
    value = sq_l2_on_grid(g.grid.weights, g.values.col(i));
  }
  std::lock_guard lock(mutex_);
  l2_sq_(i) = value;
  return value;
}

void CandidateSet::materialize() const {
  for (Eigen::Index i = 0; i < size(); ++i) {
    for (Eigen::Index j = i + 1; j < size(); ++j) hellinger_sq(i, j);
  }
}

Eigen::MatrixXd CandidateSet::distance_matrix_sq() const {
  std::lock_guard lock(mutex_);
  return dist_sq_;
}

std::unique_ptr<CandidateSet> build_family(FamilyTag tag, const Eigen::VectorXd& training, QuadratureSpec quad) {
  return std::make_unique<CandidateSet>(build_candidates(tag, training), quad);
}

}  // namespace tho
