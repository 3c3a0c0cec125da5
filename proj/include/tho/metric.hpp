#pragma once

#include "tho/density.hpp"
#include "tho/quadrature.hpp"

#include <Eigen/Core>

namespace tho {

// Grid-level integrals. Arguments are weights and pdf values at the same nodes.

template <typename W, typename F, typename G>
typename W::Scalar hellinger_sq_on_grid(const Eigen::MatrixBase<W>& weights, const Eigen::MatrixBase<F>& f,
                                        const Eigen::MatrixBase<G>& g) {
  return typename W::Scalar(0.5) *
         weights.dot((f.cwiseSqrt() - g.cwiseSqrt()).cwiseAbs2());
}

template <typename W, typename F, typename G>
typename W::Scalar lq_on_grid(const Eigen::MatrixBase<W>& weights, const Eigen::MatrixBase<F>& f,
                              const Eigen::MatrixBase<G>& g, int q) {
  return q == 1 ? weights.dot((f - g).cwiseAbs()) : weights.dot((f - g).cwiseAbs2());
}

template <typename W, typename F>
typename W::Scalar sq_l2_on_grid(const Eigen::MatrixBase<W>& weights, const Eigen::MatrixBase<F>& f) {
  return weights.dot(f.cwiseAbs2());
}

/// Two histograms restated on the union of their breakpoints.
struct MergedHistograms {
  Eigen::VectorXd widths;
  Eigen::VectorXd f_heights;
  Eigen::VectorXd g_heights;
};

MergedHistograms merge(const Histogram& f, const Histogram& g);

// Exact forms for histogram pairs.
double hellinger_sq(const Histogram& f, const Histogram& g);
double lq_distance(const Histogram& f, const Histogram& g, int q);
double sq_l2_norm(const Histogram& f);

/// Squared Hellinger distance h^2(f, g) = 1/2 * integral of (sqrt f - sqrt g)^2, in [0, 1].
double hellinger_sq(const Density& f, const Density& g, const QuadratureSpec& quad = {});

/// ||f - g||_q^q for q in {1, 2}; +inf for q = 2 when either density is not square integrable.
double lq_distance(const Density& f, const Density& g, int q, const QuadratureSpec& quad = {});

/// Integral of f^2; +inf when f is not square integrable.
double sq_l2_norm(const Density& f, const QuadratureSpec& quad = {});

/// Integral of f over its quadrature window (normalisation check).
double total_mass(const Density& f, const QuadratureSpec& quad = {});

}  // namespace tho
