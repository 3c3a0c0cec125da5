#pragma once

#include "tho/estimators.hpp"
#include "tho/quadrature.hpp"

#include <Eigen/Core>

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tho {

/// Indexed finite family of candidate densities with a lazily filled
/// Hellinger distance matrix.
///
/// Histogram pairs use the exact merged-partition forms. Every other pair is
/// integrated on one grid shared by the whole family, built on first use and
/// adapted to all members, so each member is evaluated once.
///
/// Indices are 0-based. Distance lookups are thread safe.
class CandidateSet {
 public:
  explicit CandidateSet(std::vector<Candidate> members, QuadratureSpec quad = {});

  CandidateSet(const CandidateSet&) = delete;
  CandidateSet& operator=(const CandidateSet&) = delete;

  Eigen::Index size() const { return static_cast<Eigen::Index>(members_.size()); }
  const Candidate& operator[](Eigen::Index i) const { return members_[static_cast<std::size_t>(i)]; }
  const Density& density(Eigen::Index i) const { return (*this)[i].density; }
  const std::string& label(Eigen::Index i) const { return (*this)[i].label; }
  const QuadratureSpec& quadrature() const { return quad_; }

  double hellinger_sq(Eigen::Index i, Eigen::Index j) const;
  double hellinger(Eigen::Index i, Eigen::Index j) const;
  /// Integral of the member's square; +inf when not square integrable.
  double sq_l2_norm(Eigen::Index i) const;

  bool histogram_pair(Eigen::Index i, Eigen::Index j) const;
  /// Shared grid with one column of values per member; built on first call.
  const SampledGrid& shared_grid() const;

  /// Fills the whole distance matrix.
  void materialize() const;
  /// Snapshot of the squared distances; NaN where not yet computed.
  Eigen::MatrixXd distance_matrix_sq() const;

 private:
  double compute_sq(Eigen::Index i, Eigen::Index j) const;

  std::vector<Candidate> members_;
  QuadratureSpec quad_;
  mutable std::mutex mutex_;
  mutable Eigen::MatrixXd dist_sq_;
  mutable Eigen::VectorXd l2_sq_;
  mutable std::once_flag grid_once_;
  mutable std::unique_ptr<SampledGrid> grid_;
};

/// Builds a family on the training sample.
std::unique_ptr<CandidateSet> build_family(FamilyTag tag, const Eigen::VectorXd& training,
                                           QuadratureSpec quad = {});

}  // namespace tho
