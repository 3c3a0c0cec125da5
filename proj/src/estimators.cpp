#include "tho/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tho {

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::SR: return "SR";
    case FamilyTag::SI: return "SI";
    case FamilyTag::SK: return "SK";
    case FamilyTag::SP: return "SP";
    case FamilyTag::SC: return "SC";
    case FamilyTag::S1: return "S1";
    case FamilyTag::S2: return "S2";
  }
  return "?";
}

FamilyTag family_from_string(const std::string& name) {
  std::string key = name;
  if (key.size() == 3 && key[1] == '_') key.erase(1, 1);  // accept S_R spelling
  for (const auto t : {FamilyTag::SR, FamilyTag::SI, FamilyTag::SK, FamilyTag::SP, FamilyTag::SC,
                       FamilyTag::S1, FamilyTag::S2}) {
    if (to_string(t) == key) return t;
  }
  throw std::invalid_argument("unknown family tag: " + name);
}

std::string to_string(Recipe::Kind kind) {
  switch (kind) {
    case Recipe::Kind::regular_histogram: return "regular_histogram";
    case Recipe::Kind::irregular_histogram: return "irregular_histogram";
    case Recipe::Kind::kernel: return "kernel";
    case Recipe::Kind::parametric: return "parametric";
  }
  return "?";
}

int family_size(Eigen::Index n1) {
  if (n1 < 2) return 1;
  const double n = static_cast<double>(n1);
  return static_cast<int>(std::ceil(n / std::log(n)));
}

namespace {

struct Range {
  double lo;
  double hi;
};

Range data_range(const Eigen::VectorXd& x) {
  if (x.size() < 2) throw DegenerateSampleError("need at least two observations");
  const Range r{x.minCoeff(), x.maxCoeff()};
  if (!(r.hi > r.lo)) throw DegenerateSampleError("all observations are equal");
  return r;
}

Eigen::VectorXd sorted_copy(const Eigen::VectorXd& x) {
  Eigen::VectorXd s = x;
  std::sort(s.begin(), s.end());
  return s;
}

Histogram histogram_with_counts(const Eigen::VectorXd& x, Eigen::VectorXd breaks) {
  const Eigen::Index bins = breaks.size() - 1;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  const double* first = breaks.data();
  const double* last = first + breaks.size();
  for (const double xi : x) {
    Eigen::Index k = (std::upper_bound(first, last, xi) - first) - 1;
    k = std::clamp<Eigen::Index>(k, 0, bins - 1);
    counts(k) += 1.0;
  }
  return Histogram(std::move(breaks), counts / static_cast<double>(x.size()));
}

}  // namespace

Histogram regular_histogram(const Eigen::VectorXd& x, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  const Range r = data_range(x);
  Eigen::VectorXd breaks(bins + 1);
  const double width = (r.hi - r.lo) / bins;
  for (int k = 0; k < bins; ++k) breaks(k) = r.lo + width * k;
  breaks(bins) = r.hi;
  return histogram_with_counts(x, std::move(breaks));
}

std::vector<Histogram> fit_regular_histograms(const Eigen::VectorXd& x) {
  data_range(x);
  const int count = family_size(x.size());
  std::vector<Histogram> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int d = 1; d <= count; ++d) out.push_back(regular_histogram(x, d));
  return out;
}

Eigen::VectorXd irregular_candidate_grid(const Eigen::VectorXd& sorted_x, int max_interior) {
  const Range r = data_range(sorted_x);
  std::vector<double> mids;
  for (Eigen::Index i = 0; i + 1 < sorted_x.size(); ++i) {
    const double a = sorted_x(i);
    const double b = sorted_x(i + 1);
    if (!(b > a)) continue;
    const double m = 0.5 * (a + b);
    if (m > a && m < b) mids.push_back(m);
  }
  std::vector<double> chosen;
  if (static_cast<int>(mids.size()) <= max_interior) {
    chosen = std::move(mids);
  } else if (max_interior == 1) {
    chosen.push_back(mids[mids.size() / 2]);
  } else if (max_interior > 1) {
    const double step = static_cast<double>(mids.size() - 1) / static_cast<double>(max_interior - 1);
    for (int k = 0; k < max_interior; ++k) {
      chosen.push_back(mids[static_cast<std::size_t>(std::llround(step * k))]);
    }
  }
  Eigen::VectorXd grid(static_cast<Eigen::Index>(chosen.size()) + 2);
  grid(0) = r.lo;
  for (std::size_t k = 0; k < chosen.size(); ++k) grid(static_cast<Eigen::Index>(k) + 1) = chosen[k];
  grid(grid.size() - 1) = r.hi;
  return grid;
}

namespace {

// Log-likelihood contribution of a cell with `count` points and the given width.
double cell_log_likelihood(double count, double n, double width) {
  return count > 0.0 ? count * std::log(count / (n * width)) : 0.0;
}

// cum(k) = number of observations below grid(k); cum(K) = n.
Eigen::VectorXd cumulative_counts(const Eigen::VectorXd& sorted_x, const Eigen::VectorXd& grid) {
  const Eigen::Index k_max = grid.size() - 1;
  Eigen::VectorXd cum(grid.size());
  const double* first = sorted_x.data();
  const double* last = first + sorted_x.size();
  for (Eigen::Index k = 0; k < k_max; ++k) {
    cum(k) = static_cast<double>(std::lower_bound(first, last, grid(k)) - first);
  }
  cum(k_max) = static_cast<double>(sorted_x.size());
  return cum;
}

}  // namespace

std::vector<BestPartition> best_partitions(const Eigen::VectorXd& sorted_x, const Eigen::VectorXd& grid,
                                           int max_bins) {
  const Eigen::Index cells = grid.size() - 1;
  if (cells < 1) throw std::invalid_argument("grid needs at least two points");
  const double n = static_cast<double>(sorted_x.size());
  const Eigen::VectorXd cum = cumulative_counts(sorted_x, grid);
  const int d_max = static_cast<int>(std::min<Eigen::Index>(max_bins, cells));

  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(cells + 1, cells + 1);
  for (Eigen::Index a = 0; a < cells; ++a) {
    for (Eigen::Index b = a + 1; b <= cells; ++b) {
      cost(a, b) = cell_log_likelihood(cum(b) - cum(a), n, grid(b) - grid(a));
    }
  }

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  // best(d, b): best (d+1)-cell partition of [grid(0), grid(b)]
  Eigen::MatrixXd best = Eigen::MatrixXd::Constant(d_max, cells + 1, kNegInf);
  Eigen::MatrixXi parent = Eigen::MatrixXi::Constant(d_max, cells + 1, -1);
  for (Eigen::Index b = 1; b <= cells; ++b) {
    best(0, b) = cost(0, b);
    parent(0, b) = 0;
  }
  for (int d = 1; d < d_max; ++d) {
    for (Eigen::Index b = d + 1; b <= cells; ++b) {
      double top = kNegInf;
      int arg = -1;
      for (Eigen::Index a = d; a < b; ++a) {
        const double v = best(d - 1, a) + cost(a, b);
        if (v > top) {
          top = v;
          arg = static_cast<int>(a);
        }
      }
      best(d, b) = top;
      parent(d, b) = arg;
    }
  }

  std::vector<BestPartition> out;
  out.reserve(static_cast<std::size_t>(d_max));
  for (int d = 0; d < d_max; ++d) {
    BestPartition p;
    p.log_likelihood = best(d, cells);
    Eigen::VectorXd breaks(d + 2);
    Eigen::Index b = cells;
    breaks(d + 1) = grid(cells);
    for (int level = d; level >= 0; --level) {
      const Eigen::Index a = parent(level, b);
      breaks(level) = grid(a);
      b = a;
    }
    p.breaks = std::move(breaks);
    out.push_back(std::move(p));
  }
  return out;
}

double partition_log_likelihood(const Eigen::VectorXd& sorted_x, const Eigen::VectorXd& breaks) {
  const Eigen::VectorXd cum = cumulative_counts(sorted_x, breaks);
  const double n = static_cast<double>(sorted_x.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < breaks.size(); ++k) {
    total += cell_log_likelihood(cum(k + 1) - cum(k), n, breaks(k + 1) - breaks(k));
  }
  return total;
}

namespace {

std::vector<Histogram> irregular_family(const Eigen::VectorXd& x, int max_bins) {
  const Eigen::VectorXd sorted = sorted_copy(x);
  const Eigen::VectorXd grid = irregular_candidate_grid(sorted);
  const auto partitions = best_partitions(sorted, grid, max_bins);
  std::vector<Histogram> out;
  out.reserve(partitions.size());
  for (const auto& p : partitions) out.push_back(histogram_with_counts(sorted, p.breaks));
  return out;
}

}  // namespace

std::vector<Histogram> fit_irregular_histograms(const Eigen::VectorXd& x) {
  data_range(x);
  return irregular_family(x, std::min(100, family_size(x.size())));
}

Histogram irregular_histogram(const Eigen::VectorXd& x, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  auto family = irregular_family(x, bins);
  if (static_cast<int>(family.size()) < bins) {
    throw DegenerateSampleError("candidate grid too coarse for the requested bin count");
  }
  return std::move(family.back());
}

double kernel_bandwidth(const Eigen::VectorXd& x, int j) {
  if (j < 1) throw std::invalid_argument("kernel index must be >= 1");
  const Range r = data_range(x);
  return (r.hi - r.lo) / (2.0 * j);
}

std::vector<KernelEstimate> fit_kernel_estimates(const Eigen::VectorXd& x) {
  const Range r = data_range(x);
  auto centers = std::make_shared<const Eigen::VectorXd>(sorted_copy(x));
  const int count = family_size(x.size());
  std::vector<KernelEstimate> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 1; j <= count; ++j) out.emplace_back(centers, (r.hi - r.lo) / (2.0 * j));
  return out;
}

namespace {

struct Moments {
  double mean;
  double var;  // unbiased
};

Moments moments(const Eigen::VectorXd& x) {
  const double n = static_cast<double>(x.size());
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / (n - 1.0);
  return {mean, var};
}

}  // namespace

std::optional<ParametricEstimate> fit_parametric(const Eigen::VectorXd& x, ParametricFamily family) {
  if (x.size() < 2) throw DegenerateSampleError("parametric fits need at least two observations");
  const Moments m = moments(x);
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (!(m.var > 0.0)) return std::nullopt;
  switch (family) {
    case ParametricFamily::gaussian:
      return ParametricEstimate(family, m.mean, std::sqrt(m.var));
    case ParametricFamily::exponential:
      if (lo < 0.0 || !(m.mean > 0.0)) return std::nullopt;
      return ParametricEstimate(family, 1.0 / m.mean);
    case ParametricFamily::lognormal: {
      if (!(lo > 0.0)) return std::nullopt;
      const Moments lm = moments(x.array().log().matrix());
      if (!(lm.var > 0.0)) return std::nullopt;
      return ParametricEstimate(family, lm.mean, std::sqrt(lm.var));
    }
    case ParametricFamily::chisquare:
      if (lo < 0.0 || !(m.mean > 0.0)) return std::nullopt;
      return ParametricEstimate(family, m.mean);
    case ParametricFamily::gamma:
      if (lo < 0.0 || !(m.mean > 0.0)) return std::nullopt;
      return ParametricEstimate(family, m.mean * m.mean / m.var, m.mean / m.var);
    case ParametricFamily::beta: {
      if (!(lo > 0.0) || !(hi < 1.0)) return std::nullopt;
      const double common = m.mean * (1.0 - m.mean) / m.var - 1.0;
      if (!(common > 0.0)) return std::nullopt;
      return ParametricEstimate(family, m.mean * common, (1.0 - m.mean) * common);
    }
    case ParametricFamily::uniform:
      return ParametricEstimate(family, lo, hi);
  }
  return std::nullopt;
}

std::vector<ParametricEstimate> fit_parametric(const Eigen::VectorXd& x) {
  std::vector<ParametricEstimate> out;
  for (const auto f : {ParametricFamily::gaussian, ParametricFamily::exponential,
                       ParametricFamily::lognormal, ParametricFamily::chisquare,
                       ParametricFamily::gamma, ParametricFamily::beta, ParametricFamily::uniform}) {
    if (auto fit = fit_parametric(x, f)) out.push_back(*fit);
  }
  if (out.empty()) throw DegenerateSampleError("no parametric family fits the data");
  return out;
}

std::vector<Candidate> build_candidates(FamilyTag tag, const Eigen::VectorXd& x) {
  const bool regular = tag == FamilyTag::SR || tag == FamilyTag::SC || tag == FamilyTag::S1 ||
                       tag == FamilyTag::S2;
  const bool irregular = tag == FamilyTag::SI || tag == FamilyTag::SC || tag == FamilyTag::S1 ||
                         tag == FamilyTag::S2;
  const bool kernel = tag == FamilyTag::SK || tag == FamilyTag::S1 || tag == FamilyTag::S2;
  const bool parametric = tag == FamilyTag::SP || tag == FamilyTag::S2;

  std::vector<Candidate> out;
  if (regular) {
    int d = 1;
    for (auto& h : fit_regular_histograms(x)) {
      out.push_back({Density(std::move(h)), "SR:D=" + std::to_string(d), {Recipe::Kind::regular_histogram, d, {}}});
      ++d;
    }
  }
  if (irregular) {
    int d = 1;
    for (auto& h : fit_irregular_histograms(x)) {
      out.push_back({Density(std::move(h)), "SI:D=" + std::to_string(d), {Recipe::Kind::irregular_histogram, d, {}}});
      ++d;
    }
  }
  if (kernel) {
    int j = 1;
    for (auto& k : fit_kernel_estimates(x)) {
      out.push_back({Density(std::move(k)), "SK:j=" + std::to_string(j), {Recipe::Kind::kernel, j, {}}});
      ++j;
    }
  }
  if (parametric) {
    for (auto& p : fit_parametric(x)) {
      const auto family = p.family();
      out.push_back({Density(std::move(p)), "SP:" + to_string(family), {Recipe::Kind::parametric, 0, family}});
    }
  }
  return out;
}

Density refit(const Recipe& recipe, const Eigen::VectorXd& x) {
  switch (recipe.kind) {
    case Recipe::Kind::regular_histogram: return Density(regular_histogram(x, recipe.index));
    case Recipe::Kind::irregular_histogram: return Density(irregular_histogram(x, recipe.index));
    case Recipe::Kind::kernel: return Density(KernelEstimate(x, kernel_bandwidth(x, recipe.index)));
    case Recipe::Kind::parametric: {
      auto fit = fit_parametric(x, recipe.family);
      if (!fit) throw DegenerateSampleError("parametric family " + to_string(recipe.family) + " does not fit the sample");
      return Density(std::move(*fit));
    }
  }
  throw std::logic_error("unknown recipe kind");
}

}  // namespace tho
