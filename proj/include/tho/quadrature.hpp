#pragma once

#include "tho/density.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tho {

/// Composite Simpson on a breakpoint-aware segmentation.
///
/// The window covered by the densities is cut at every breakpoint, every
/// graded point, every member's window end and `uniform_cuts` equally spaced
/// points. Each gap is then split so that a segment spans at most
/// `scale_span` smoothness scales of the members active on it; a full-width
/// segment gets `panels` Simpson panels, narrower ones proportionally fewer
/// (never less than 2). Segments ending on a graded point use the substitution
/// x = a + w t^grading so that integrable power singularities become smooth.
///
/// The per-segment error is estimated by comparing with the half-resolution
/// Simpson sum on the same nodes; segments are bisected until the summed
/// estimate drops below `tolerance`, `max_refinements` rounds are spent or the
/// grid would exceed `max_samples` member evaluations.
struct QuadratureSpec {
  int panels = 64;
  double scale_span = 32.0;
  int uniform_cuts = 4;
  int grading = 8;
  double tolerance = 1e-10;
  double max_residual = 1e-7;
  int max_refinements = 12;
  double max_samples = 5e7;  ///< nodes times members; refinement stops beyond this

  /// Throws std::invalid_argument when panels is odd or < 2, or a field is out of range.
  void validate() const;
};

/// Raised when refinement is exhausted before the residual estimate is small enough.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct QuadratureSegment {
  double lo = 0.0;
  double hi = 0.0;
  int panels = 2;
  int graded = 0;  ///< 0 none, -1 graded toward lo, +1 graded toward hi
  Eigen::Index offset = 0;
  Eigen::Index count = 0;
};

/// Nodes and weights of a segmented Simpson rule. Segments do not share
/// nodes: endpoint nodes sit one ulp inside their segment so that
/// piecewise-constant densities are sampled on the correct side of a jump.
struct QuadratureGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd coarse_weights;  ///< half-resolution rule on the same nodes
  std::vector<QuadratureSegment> segments;

  Eigen::Index size() const { return nodes.size(); }
};

/// Grid plus the members' pdf values at its nodes (one column per member).
struct SampledGrid {
  QuadratureGrid grid;
  Eigen::MatrixXd values;
  double residual = 0.0;
};

/// Maps member values at a block of nodes to the integrands whose residual is controlled.
using ResidualProbe = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& values)>;

/// Default probe: each member's pdf and its square root.
Eigen::MatrixXd density_and_root(const Eigen::MatrixXd& values);

/// Builds a grid adapted to all members and samples them on it.
SampledGrid sample_on_grid(std::span<const Density* const> members, const QuadratureSpec& spec,
                           const ResidualProbe& probe = density_and_root);

/// Single-segment Simpson nodes and weights (exposed for tests).
QuadratureGrid make_segment_grid(const QuadratureSegment& segment, int grading);

/// Simpson integral of a callable over [lo, hi] with the given number of panels.
double simpson(const std::function<double(double)>& f, double lo, double hi, int panels);

}  // namespace tho
