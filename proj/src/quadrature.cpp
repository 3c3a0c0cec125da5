#include "tho/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tho {

void QuadratureSpec::validate() const {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("quadrature panels must be even and >= 2");
  if (!(scale_span > 0.0)) throw std::invalid_argument("quadrature scale_span must be positive");
  if (uniform_cuts < 1) throw std::invalid_argument("quadrature uniform_cuts must be >= 1");
  if (grading < 1) throw std::invalid_argument("quadrature grading must be >= 1");
  if (!(tolerance > 0.0) || !(max_residual >= tolerance)) {
    throw std::invalid_argument("quadrature tolerances must satisfy 0 < tolerance <= max_residual");
  }
  if (max_refinements < 0) throw std::invalid_argument("quadrature max_refinements must be >= 0");
  if (!(max_samples > 0.0)) throw std::invalid_argument("quadrature max_samples must be positive");
}

Eigen::MatrixXd density_and_root(const Eigen::MatrixXd& values) {
  Eigen::MatrixXd out(values.rows(), 2 * values.cols());
  out << values, values.cwiseSqrt();
  return out;
}

namespace {

// Simpson coefficient pattern 1 4 2 4 ... 4 1 for `intervals` intervals.
double simpson_coefficient(Eigen::Index i, Eigen::Index intervals) {
  if (i == 0 || i == intervals) return 1.0;
  return (i % 2 == 1) ? 4.0 : 2.0;
}

}  // namespace

QuadratureGrid make_segment_grid(const QuadratureSegment& segment, int grading) {
  const Eigen::Index intervals = 2 * segment.panels;
  const Eigen::Index count = intervals + 1;
  const double width = segment.hi - segment.lo;
  QuadratureGrid g;
  g.nodes.resize(count);
  g.weights.resize(count);
  g.coarse_weights.setZero(count);
  const double dt = 1.0 / static_cast<double>(intervals);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * dt;
    double x = 0.0;
    double jacobian = width;
    if (segment.graded == 0) {
      x = segment.lo + width * t;
    } else {
      const double tk = std::pow(t, grading);
      jacobian = width * grading * std::pow(t, grading - 1);
      x = segment.graded < 0 ? segment.lo + width * tk : segment.hi - width * tk;
    }
    g.nodes(i) = x;
    g.weights(i) = simpson_coefficient(i, intervals) * dt / 3.0 * jacobian;
    if (i % 2 == 0) {
      g.coarse_weights(i) = simpson_coefficient(i / 2, intervals / 2) * 2.0 * dt / 3.0 * jacobian;
    }
  }
  // Endpoint nodes stay strictly inside the segment.
  auto inward = [&](Eigen::Index i) {
    if (g.nodes(i) <= segment.lo) g.nodes(i) = std::nextafter(segment.lo, segment.hi);
    if (g.nodes(i) >= segment.hi) g.nodes(i) = std::nextafter(segment.hi, segment.lo);
  };
  for (Eigen::Index i = 0; i < count; ++i) inward(i);
  g.segments.push_back(segment);
  g.segments.back().offset = 0;
  g.segments.back().count = count;
  return g;
}

namespace {

constexpr int kGeometricCuts = 40;

struct MemberInfo {
  QuadratureHints hints;
};

struct WorkSegment {
  QuadratureSegment seg;
  QuadratureGrid grid;
  Eigen::MatrixXd values;
  double residual = 0.0;
};

bool is_graded_point(double x, const std::vector<MemberInfo>& members) {
  for (const auto& m : members) {
    for (const double g : m.hints.graded_points) {
      if (g == x) return true;
    }
  }
  return false;
}

double active_scale(double a, double b, const std::vector<MemberInfo>& members) {
  double scale = kInf;
  for (const auto& m : members) {
    if (m.hints.hi <= a || m.hints.lo >= b) continue;
    scale = std::min(scale, m.hints.scale);
  }
  return scale;
}

void evaluate(WorkSegment& w, std::span<const Density* const> members, int grading) {
  w.grid = make_segment_grid(w.seg, grading);
  w.values.resize(w.grid.size(), static_cast<Eigen::Index>(members.size()));
  for (std::size_t m = 0; m < members.size(); ++m) {
    w.values.col(static_cast<Eigen::Index>(m)) = members[m]->eval(w.grid.nodes);
  }
  // Zero-weight nodes sit on a graded point where the pdf may be infinite.
  for (Eigen::Index i = 0; i < w.grid.size(); ++i) {
    if (w.grid.weights(i) == 0.0) w.values.row(i).setZero();
  }
}

void estimate_residual(WorkSegment& w, const ResidualProbe& probe) {
  const Eigen::MatrixXd integrands = probe(w.values);
  const Eigen::VectorXd diff = w.grid.weights - w.grid.coarse_weights;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < integrands.cols(); ++c) {
    const double r = std::abs(diff.dot(integrands.col(c))) / 15.0;
    if (!std::isfinite(r)) {
      worst = kInf;
      break;
    }
    worst = std::max(worst, r);
  }
  w.residual = worst;
}

double residual_of(const std::vector<WorkSegment>& work) {
  double r = 0.0;
  for (const auto& w : work) r += w.residual;
  return r;
}

std::vector<QuadratureSegment> initial_segments(const std::vector<MemberInfo>& members,
                                                const QuadratureSpec& spec) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& m : members) {
    lo = std::min(lo, m.hints.lo);
    hi = std::max(hi, m.hints.hi);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw std::invalid_argument("quadrature window is empty or unbounded");
  }
  std::vector<double> cuts{lo, hi};
  for (int k = 1; k < spec.uniform_cuts; ++k) {
    cuts.push_back(lo + (hi - lo) * static_cast<double>(k) / spec.uniform_cuts);
  }
  for (const auto& m : members) {
    cuts.push_back(m.hints.lo);
    cuts.push_back(m.hints.hi);
    cuts.insert(cuts.end(), m.hints.breakpoints.begin(), m.hints.breakpoints.end());
    cuts.insert(cuts.end(), m.hints.graded_points.begin(), m.hints.graded_points.end());
  }
  // Geometric cuts toward each graded point keep the ungraded neighbours of a
  // singularity well resolved when other members add breakpoints close to it.
  for (const auto& m : members) {
    for (const double g : m.hints.graded_points) {
      for (const double reach : {hi - g, g - lo}) {
        const double dir = reach == hi - g ? 1.0 : -1.0;
        for (int k = 1; k <= kGeometricCuts && reach > 0.0; ++k) cuts.push_back(g + dir * std::ldexp(reach, -k));
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < lo || c > hi; }),
             cuts.end());

  std::vector<QuadratureSegment> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    const double scale = active_scale(a, b, members);
    const double full = spec.scale_span * scale;
    const auto pieces = std::isfinite(full) ? std::max<long>(1, static_cast<long>(std::ceil((b - a) / full))) : 1L;
    const bool grade_lo = is_graded_point(a, members);
    const bool grade_hi = is_graded_point(b, members);
    long n = pieces;
    if (grade_lo && grade_hi && n == 1) n = 2;
    const double w = (b - a) / static_cast<double>(n);
    for (long p = 0; p < n; ++p) {
      QuadratureSegment s;
      s.lo = a + w * static_cast<double>(p);
      s.hi = (p + 1 == n) ? b : a + w * static_cast<double>(p + 1);
      if (p == 0 && grade_lo) {
        s.graded = -1;
      } else if (p + 1 == n && grade_hi) {
        s.graded = 1;
      }
      if (s.graded != 0) {
        s.panels = spec.panels;
      } else if (std::isfinite(full)) {
        int panels = static_cast<int>(std::ceil(spec.panels * (s.hi - s.lo) / full));
        panels += panels % 2;
        s.panels = std::clamp(panels, 2, spec.panels);
      } else {
        s.panels = 2;
      }
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

SampledGrid sample_on_grid(std::span<const Density* const> members, const QuadratureSpec& spec,
                           const ResidualProbe& probe) {
  spec.validate();
  if (members.empty()) throw std::invalid_argument("sample_on_grid needs at least one density");
  std::vector<MemberInfo> info;
  info.reserve(members.size());
  for (const Density* d : members) info.push_back({d->hints()});

  std::vector<WorkSegment> work;
  for (const auto& s : initial_segments(info, spec)) {
    WorkSegment w;
    w.seg = s;
    evaluate(w, members, spec.grading);
    estimate_residual(w, probe);
    work.push_back(std::move(w));
  }

  auto total_residual = [&] { return residual_of(work); };

  double residual = total_residual();
  auto samples = [&] {
    double count = 0.0;
    for (const auto& w : work) count += static_cast<double>(w.grid.size());
    return count * static_cast<double>(members.size());
  };
  if (samples() > spec.max_samples) {
    throw QuadratureError("quadrature grid exceeds the sample budget before refinement", residual_of(work));
  }

  for (int round = 0; round < spec.max_refinements && residual > spec.tolerance; ++round) {
    if (2.0 * samples() > spec.max_samples) break;
    const double share = spec.tolerance / static_cast<double>(work.size());
    double worst = 0.0;
    for (const auto& w : work) worst = std::max(worst, w.residual);
    std::vector<WorkSegment> next;
    next.reserve(work.size());
    for (auto& w : work) {
      const bool split = w.residual > share || w.residual == worst;
      if (!split) {
        next.push_back(std::move(w));
        continue;
      }
      const double mid = 0.5 * (w.seg.lo + w.seg.hi);
      if (!(mid > w.seg.lo && mid < w.seg.hi)) {
        next.push_back(std::move(w));
        continue;
      }
      WorkSegment left;
      WorkSegment right;
      left.seg = w.seg;
      right.seg = w.seg;
      left.seg.hi = mid;
      right.seg.lo = mid;
      left.seg.graded = w.seg.graded < 0 ? -1 : 0;
      right.seg.graded = w.seg.graded > 0 ? 1 : 0;
      for (WorkSegment* half : {&left, &right}) {
        evaluate(*half, members, spec.grading);
        estimate_residual(*half, probe);
        next.push_back(std::move(*half));
      }
    }
    work = std::move(next);
    residual = total_residual();
  }
  if (!(residual <= spec.max_residual)) {
    std::ostringstream os;
    os << "quadrature did not converge: residual estimate " << residual << " within "
       << spec.max_refinements << " refinement rounds";
    throw QuadratureError(os.str(), residual);
  }

  SampledGrid out;
  out.residual = residual;
  Eigen::Index total = 0;
  for (const auto& w : work) total += w.grid.size();
  out.grid.nodes.resize(total);
  out.grid.weights.resize(total);
  out.grid.coarse_weights.resize(total);
  out.values.resize(total, static_cast<Eigen::Index>(members.size()));
  Eigen::Index offset = 0;
  for (const auto& w : work) {
    const Eigen::Index n = w.grid.size();
    out.grid.nodes.segment(offset, n) = w.grid.nodes;
    out.grid.weights.segment(offset, n) = w.grid.weights;
    out.grid.coarse_weights.segment(offset, n) = w.grid.coarse_weights;
    out.values.middleRows(offset, n) = w.values;
    QuadratureSegment s = w.seg;
    s.offset = offset;
    s.count = n;
    out.grid.segments.push_back(s);
    offset += n;
  }
  return out;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("simpson panels must be even and >= 2");
  const int intervals = 2 * panels;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + h * i);
  return sum * h / 3.0;
}

}  // namespace tho
