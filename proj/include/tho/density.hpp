#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace tho {

enum class DensityKind { histogram, kernel, parametric, reference };

std::string to_string(DensityKind kind);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; either end may be infinite.
struct Support {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded() const { return lo > -kInf && hi < kInf; }
};

/// What the quadrature needs to know about a density to integrate it well.
struct QuadratureHints {
  double lo = 0.0;  ///< finite integration window
  double hi = 0.0;
  std::vector<double> breakpoints;    ///< discontinuities of the pdf
  std::vector<double> graded_points;  ///< points where the pdf or its root is not smooth
  double scale = kInf;                ///< length over which the pdf changes; inf when piecewise constant
};

/// Piecewise-constant density on strictly increasing breakpoints.
class Histogram {
 public:
  Histogram(Eigen::VectorXd breaks, Eigen::VectorXd masses);

  const Eigen::VectorXd& breaks() const { return breaks_; }
  const Eigen::VectorXd& masses() const { return masses_; }
  const Eigen::VectorXd& heights() const { return heights_; }
  Eigen::Index bins() const { return masses_.size(); }

  /// Cell holding x, cells being [b_k, b_{k+1}) with the last one closed; -1 outside.
  Eigen::Index cell(double x) const;
  double eval(double x) const;
  Support support() const { return {breaks_(0), breaks_(breaks_.size() - 1)}; }
  QuadratureHints hints() const;

  /// Sum of log pdf over the points; -inf when a point has zero density.
  double log_likelihood(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd breaks_;
  Eigen::VectorXd masses_;
  Eigen::VectorXd heights_;
};

/// Gaussian kernel density estimate with a fixed bandwidth.
class KernelEstimate {
 public:
  /// Gaussian contributions beyond this many bandwidths are dropped (relative size < 1.3e-14).
  static constexpr double kCutoff = 8.0;

  KernelEstimate(Eigen::VectorXd centers, double bandwidth);
  KernelEstimate(std::shared_ptr<const Eigen::VectorXd> sorted_centers, double bandwidth);

  const Eigen::VectorXd& centers() const { return *centers_; }
  double bandwidth() const { return bandwidth_; }

  double eval(double x) const;
  /// Evaluation at ascending points; reuses the kernel window between neighbours.
  void eval_sorted(const Eigen::Ref<const Eigen::VectorXd>& xs, Eigen::Ref<Eigen::VectorXd> out) const;
  Support support() const { return {-kInf, kInf}; }
  QuadratureHints hints() const;

 private:
  std::shared_ptr<const Eigen::VectorXd> centers_;
  double bandwidth_;
  double norm_;
};

enum class ParametricFamily { gaussian, exponential, lognormal, chisquare, gamma, beta, uniform };

std::string to_string(ParametricFamily family);
ParametricFamily parametric_family_from_string(const std::string& name);

/// Member of a standard parametric family.
///
/// Parameters: gaussian (mean, sd), exponential (rate), lognormal (meanlog, sdlog),
/// chisquare (df), gamma (shape, rate), beta (alpha, beta), uniform (lo, hi).
class ParametricEstimate {
 public:
  ParametricEstimate(ParametricFamily family, double a, double b = 0.0);

  ParametricFamily family() const { return family_; }
  double param(int k) const { return k == 0 ? a_ : b_; }
  int param_count() const;

  double eval(double x) const;
  Support support() const;
  QuadratureHints hints() const;
  bool square_integrable() const;

 private:
  ParametricFamily family_;
  double a_;
  double b_;
  double log_norm_ = 0.0;
};

/// A fixed, known density used as ground truth in simulations.
struct ReferenceDensity {
  std::string label;
  std::function<double(double)> pdf;
  Support support;
  QuadratureHints hints;
  bool square_integrable = true;
};

/// Immutable evaluatable density; cheap to copy.
class Density {
 public:
  using Payload = std::variant<Histogram, KernelEstimate, ParametricEstimate, ReferenceDensity>;

  Density(Histogram h);
  Density(KernelEstimate k);
  Density(ParametricEstimate p);
  Density(ReferenceDensity r);

  DensityKind kind() const;
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  /// Evaluation at arbitrary points.
  Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& xs) const;
  Support support() const;
  QuadratureHints hints() const;
  bool square_integrable() const;
  std::string describe() const;

  const Histogram* as_histogram() const { return std::get_if<Histogram>(payload_.get()); }
  const KernelEstimate* as_kernel() const { return std::get_if<KernelEstimate>(payload_.get()); }
  const ParametricEstimate* as_parametric() const {
    return std::get_if<ParametricEstimate>(payload_.get());
  }
  const ReferenceDensity* as_reference() const {
    return std::get_if<ReferenceDensity>(payload_.get());
  }
  const Payload& payload() const { return *payload_; }

 private:
  std::shared_ptr<const Payload> payload_;
};

/// Sum of log pdf over the points; -inf when any point has zero density.
double log_likelihood(const Density& f, const Eigen::VectorXd& x);

}  // namespace tho
