#include "tho/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace tho {

MergedHistograms merge(const Histogram& f, const Histogram& g) {
  const Eigen::VectorXd& a = f.breaks();
  const Eigen::VectorXd& b = g.breaks();
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(a.size() + b.size()));
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(cuts));
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  MergedHistograms m;
  const auto cells = static_cast<Eigen::Index>(cuts.size()) - 1;
  m.widths.resize(cells);
  m.f_heights.resize(cells);
  m.g_heights.resize(cells);
  // Two-pointer walk: ia / ib index the cell of f / g covering the current merged cell.
  Eigen::Index ia = -1;
  Eigen::Index ib = -1;
  for (Eigen::Index k = 0; k < cells; ++k) {
    const double lo = cuts[static_cast<std::size_t>(k)];
    m.widths(k) = cuts[static_cast<std::size_t>(k) + 1] - lo;
    while (ia + 1 < a.size() && a(ia + 1) <= lo) ++ia;
    while (ib + 1 < b.size() && b(ib + 1) <= lo) ++ib;
    m.f_heights(k) = (ia >= 0 && ia < f.bins()) ? f.heights()(ia) : 0.0;
    m.g_heights(k) = (ib >= 0 && ib < g.bins()) ? g.heights()(ib) : 0.0;
  }
  return m;
}

double hellinger_sq(const Histogram& f, const Histogram& g) {
  const MergedHistograms m = merge(f, g);
  return std::clamp(hellinger_sq_on_grid(m.widths, m.f_heights, m.g_heights), 0.0, 1.0);
}

double lq_distance(const Histogram& f, const Histogram& g, int q) {
  if (q != 1 && q != 2) throw std::invalid_argument("lq_distance supports q = 1 or 2");
  const MergedHistograms m = merge(f, g);
  return lq_on_grid(m.widths, m.f_heights, m.g_heights, q);
}

double sq_l2_norm(const Histogram& f) {
  return f.heights().cwiseAbs2().dot(f.breaks().tail(f.bins()) - f.breaks().head(f.bins()));
}

namespace {

SampledGrid pair_grid(const Density& f, const Density& g, const QuadratureSpec& quad,
                      const ResidualProbe& probe) {
  const std::array<const Density*, 2> members{&f, &g};
  return sample_on_grid(members, quad, probe);
}

}  // namespace

double hellinger_sq(const Density& f, const Density& g, const QuadratureSpec& quad) {
  if (const auto* hf = f.as_histogram()) {
    if (const auto* hg = g.as_histogram()) return hellinger_sq(*hf, *hg);
  }
  const SampledGrid s = pair_grid(f, g, quad, [](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out(v.rows(), 1);
    out.col(0) = (v.col(0).cwiseSqrt() - v.col(1).cwiseSqrt()).cwiseAbs2();
    return out;
  });
  return std::clamp(hellinger_sq_on_grid(s.grid.weights, s.values.col(0), s.values.col(1)), 0.0, 1.0);
}

double lq_distance(const Density& f, const Density& g, int q, const QuadratureSpec& quad) {
  if (q != 1 && q != 2) throw std::invalid_argument("lq_distance supports q = 1 or 2");
  if (const auto* hf = f.as_histogram()) {
    if (const auto* hg = g.as_histogram()) return lq_distance(*hf, *hg, q);
  }
  if (q == 2 && (!f.square_integrable() || !g.square_integrable())) return kInf;
  const SampledGrid s = pair_grid(f, g, quad, [q](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out(v.rows(), 1);
    if (q == 1) {
      out.col(0) = (v.col(0) - v.col(1)).cwiseAbs();
    } else {
      out.col(0) = (v.col(0) - v.col(1)).cwiseAbs2();
    }
    return out;
  });
  return lq_on_grid(s.grid.weights, s.values.col(0), s.values.col(1), q);
}

double sq_l2_norm(const Density& f, const QuadratureSpec& quad) {
  if (const auto* h = f.as_histogram()) return sq_l2_norm(*h);
  if (!f.square_integrable()) return kInf;
  const std::array<const Density*, 1> members{&f};
  const SampledGrid s = sample_on_grid(members, quad, [](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out = v.cwiseAbs2();
    return out;
  });
  return sq_l2_on_grid(s.grid.weights, s.values.col(0));
}

double total_mass(const Density& f, const QuadratureSpec& quad) {
  if (const auto* h = f.as_histogram()) return h->masses().sum();
  const std::array<const Density*, 1> members{&f};
  const SampledGrid s = sample_on_grid(members, quad);
  return s.grid.weights.dot(s.values.col(0));
}

}  // namespace tho
