#include "tho/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace tho {

namespace {

// Tail mass left outside the integration window of unbounded parametric densities.
constexpr double kTailMass = 1e-12;
constexpr double kLogCutStep = 0.25;  // in units of the log-scale parameter

double normal_tail_z() {
  static const double z =
      boost::math::quantile(boost::math::complement(boost::math::normal_distribution<>(), kTailMass));
  return z;
}

double gamma_upper_quantile(double shape, double rate) {
  return boost::math::gamma_q_inv(shape, kTailMass) / rate;
}

}  // namespace

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::histogram: return "histogram";
    case DensityKind::kernel: return "kernel";
    case DensityKind::parametric: return "parametric";
    case DensityKind::reference: return "reference";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Histogram

Histogram::Histogram(Eigen::VectorXd breaks, Eigen::VectorXd masses)
    : breaks_(std::move(breaks)), masses_(std::move(masses)) {
  if (breaks_.size() < 2 || masses_.size() != breaks_.size() - 1) {
    throw std::invalid_argument("histogram needs D+1 breakpoints for D masses");
  }
  for (Eigen::Index k = 1; k < breaks_.size(); ++k) {
    if (!(breaks_(k) > breaks_(k - 1))) {
      throw std::invalid_argument("histogram breakpoints must be strictly increasing");
    }
  }
  if ((masses_.array() < 0.0).any()) throw std::invalid_argument("histogram masses must be >= 0");
  const double total = masses_.sum();
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("histogram masses must sum to 1");
  heights_ = masses_.array() / (breaks_.tail(bins()) - breaks_.head(bins())).array();
}

Eigen::Index Histogram::cell(double x) const {
  const double* first = breaks_.data();
  const double* last = first + breaks_.size();
  if (!(x >= *first) || x > *(last - 1)) return -1;
  const auto it = std::upper_bound(first, last, x);
  const Eigen::Index k = (it - first) - 1;
  return std::min<Eigen::Index>(k, bins() - 1);
}

double Histogram::eval(double x) const {
  const Eigen::Index k = cell(x);
  return k < 0 ? 0.0 : heights_(k);
}

QuadratureHints Histogram::hints() const {
  QuadratureHints h;
  h.lo = breaks_(0);
  h.hi = breaks_(breaks_.size() - 1);
  h.breakpoints.assign(breaks_.data(), breaks_.data() + breaks_.size());
  return h;
}

double Histogram::log_likelihood(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (const double xi : x) {
    const double f = eval(xi);
    if (f <= 0.0) return -kInf;
    total += std::log(f);
  }
  return total;
}

// ---------------------------------------------------------------------------
// KernelEstimate

KernelEstimate::KernelEstimate(Eigen::VectorXd centers, double bandwidth)
    : KernelEstimate(std::make_shared<const Eigen::VectorXd>([&] {
                       std::sort(centers.begin(), centers.end());
                       return std::move(centers);
                     }()),
                     bandwidth) {}

KernelEstimate::KernelEstimate(std::shared_ptr<const Eigen::VectorXd> sorted_centers, double bandwidth)
    : centers_(std::move(sorted_centers)), bandwidth_(bandwidth) {
  if (!centers_ || centers_->size() == 0) throw std::invalid_argument("kernel estimate needs centers");
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
    throw std::invalid_argument("kernel bandwidth must be positive");
  }
  norm_ = 1.0 / (static_cast<double>(centers_->size()) * bandwidth_ * std::sqrt(2.0 * std::numbers::pi));
}

double KernelEstimate::eval(double x) const {
  const double* first = centers_->data();
  const double* last = first + centers_->size();
  const double reach = kCutoff * bandwidth_;
  const double* lo = std::lower_bound(first, last, x - reach);
  const double* hi = std::upper_bound(lo, last, x + reach);
  double sum = 0.0;
  for (const double* c = lo; c != hi; ++c) {
    const double u = (x - *c) / bandwidth_;
    sum += std::exp(-0.5 * u * u);
  }
  return sum * norm_;
}

void KernelEstimate::eval_sorted(const Eigen::Ref<const Eigen::VectorXd>& xs,
                                 Eigen::Ref<Eigen::VectorXd> out) const {
  const Eigen::VectorXd& c = *centers_;
  const Eigen::Index n = c.size();
  const double reach = kCutoff * bandwidth_;
  const double inv_h = 1.0 / bandwidth_;
  Eigen::Index lo = 0;
  Eigen::Index hi = 0;
  for (Eigen::Index k = 0; k < xs.size(); ++k) {
    const double x = xs(k);
    while (lo < n && c(lo) < x - reach) ++lo;
    if (hi < lo) hi = lo;
    while (hi < n && c(hi) <= x + reach) ++hi;
    double sum = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) {
      const double u = (x - c(i)) * inv_h;
      sum += std::exp(-0.5 * u * u);
    }
    out(k) = sum * norm_;
  }
}

QuadratureHints KernelEstimate::hints() const {
  QuadratureHints h;
  const double reach = kCutoff * bandwidth_;
  h.lo = (*centers_)(0) - reach;
  h.hi = (*centers_)(centers_->size() - 1) + reach;
  h.scale = bandwidth_;
  return h;
}

// ---------------------------------------------------------------------------
// ParametricEstimate

std::string to_string(ParametricFamily family) {
  switch (family) {
    case ParametricFamily::gaussian: return "gaussian";
    case ParametricFamily::exponential: return "exponential";
    case ParametricFamily::lognormal: return "lognormal";
    case ParametricFamily::chisquare: return "chisquare";
    case ParametricFamily::gamma: return "gamma";
    case ParametricFamily::beta: return "beta";
    case ParametricFamily::uniform: return "uniform";
  }
  return "unknown";
}

ParametricFamily parametric_family_from_string(const std::string& name) {
  for (const auto f : {ParametricFamily::gaussian, ParametricFamily::exponential,
                       ParametricFamily::lognormal, ParametricFamily::chisquare,
                       ParametricFamily::gamma, ParametricFamily::beta, ParametricFamily::uniform}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown parametric family: " + name);
}

ParametricEstimate::ParametricEstimate(ParametricFamily family, double a, double b)
    : family_(family), a_(a), b_(b) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(std::isfinite(a_) && std::isfinite(b_), "parametric parameters must be finite");
  switch (family_) {
    case ParametricFamily::gaussian:
      require(b_ > 0.0, "gaussian sd must be positive");
      break;
    case ParametricFamily::exponential:
      require(a_ > 0.0, "exponential rate must be positive");
      break;
    case ParametricFamily::lognormal:
      require(b_ > 0.0, "lognormal sdlog must be positive");
      break;
    case ParametricFamily::chisquare:
      require(a_ > 0.0, "chi-square df must be positive");
      // chi-square(k) is gamma(k/2, 1/2)
      log_norm_ = -(0.5 * a_) * std::log(2.0) - std::lgamma(0.5 * a_);
      break;
    case ParametricFamily::gamma:
      require(a_ > 0.0 && b_ > 0.0, "gamma shape and rate must be positive");
      log_norm_ = a_ * std::log(b_) - std::lgamma(a_);
      break;
    case ParametricFamily::beta:
      require(a_ > 0.0 && b_ > 0.0, "beta parameters must be positive");
      log_norm_ = std::lgamma(a_ + b_) - std::lgamma(a_) - std::lgamma(b_);
      break;
    case ParametricFamily::uniform:
      require(b_ > a_, "uniform needs lo < hi");
      break;
  }
}

int ParametricEstimate::param_count() const {
  switch (family_) {
    case ParametricFamily::exponential:
    case ParametricFamily::chisquare: return 1;
    default: return 2;
  }
}

namespace {

// x^(shape-1) e^(-rate x) normalised, including the x = 0 limit.
double gamma_pdf(double x, double shape, double rate, double log_norm) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (shape < 1.0) return kInf;
    return shape == 1.0 ? std::exp(log_norm) : 0.0;
  }
  return std::exp(log_norm + (shape - 1.0) * std::log(x) - rate * x);
}

}  // namespace

double ParametricEstimate::eval(double x) const {
  switch (family_) {
    case ParametricFamily::gaussian: {
      const double u = (x - a_) / b_;
      return std::exp(-0.5 * u * u) / (b_ * std::sqrt(2.0 * std::numbers::pi));
    }
    case ParametricFamily::exponential:
      return x < 0.0 ? 0.0 : a_ * std::exp(-a_ * x);
    case ParametricFamily::lognormal: {
      if (x <= 0.0) return 0.0;
      const double u = (std::log(x) - a_) / b_;
      return std::exp(-0.5 * u * u) / (x * b_ * std::sqrt(2.0 * std::numbers::pi));
    }
    case ParametricFamily::chisquare:
      return gamma_pdf(x, 0.5 * a_, 0.5, log_norm_);
    case ParametricFamily::gamma:
      return gamma_pdf(x, a_, b_, log_norm_);
    case ParametricFamily::beta: {
      if (x < 0.0 || x > 1.0) return 0.0;
      if (x == 0.0) return a_ < 1.0 ? kInf : (a_ == 1.0 ? std::exp(log_norm_) : 0.0);
      if (x == 1.0) return b_ < 1.0 ? kInf : (b_ == 1.0 ? std::exp(log_norm_) : 0.0);
      return std::exp(log_norm_ + (a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log1p(-x));
    }
    case ParametricFamily::uniform:
      return (x < a_ || x > b_) ? 0.0 : 1.0 / (b_ - a_);
  }
  return 0.0;
}

Support ParametricEstimate::support() const {
  switch (family_) {
    case ParametricFamily::gaussian: return {-kInf, kInf};
    case ParametricFamily::beta: return {0.0, 1.0};
    case ParametricFamily::uniform: return {a_, b_};
    default: return {0.0, kInf};
  }
}

QuadratureHints ParametricEstimate::hints() const {
  QuadratureHints h;
  const double z = normal_tail_z();
  switch (family_) {
    case ParametricFamily::gaussian:
      h.lo = a_ - z * b_;
      h.hi = a_ + z * b_;
      h.scale = b_;
      break;
    case ParametricFamily::exponential:
      h.lo = 0.0;
      h.hi = -std::log(kTailMass) / a_;
      h.breakpoints = {0.0};
      h.scale = 1.0 / a_;
      break;
    case ParametricFamily::lognormal: {
      // Cuts evenly spaced in log x; a single length scale would be far too
      // fine for the right tail when b is large.
      h.lo = std::exp(a_ - z * b_);
      h.hi = std::exp(a_ + z * b_);
      for (double t = -z; t < z; t += kLogCutStep) h.breakpoints.push_back(std::exp(a_ + t * b_));
      h.scale = kInf;
      break;
    }
    case ParametricFamily::chisquare:
    case ParametricFamily::gamma: {
      const double shape = family_ == ParametricFamily::gamma ? a_ : 0.5 * a_;
      const double rate = family_ == ParametricFamily::gamma ? b_ : 0.5;
      h.lo = 0.0;
      h.hi = gamma_upper_quantile(shape, rate);
      h.breakpoints = {0.0};
      h.graded_points = {0.0};
      h.scale = std::sqrt(shape) / rate * std::min(1.0, shape);
      break;
    }
    case ParametricFamily::beta: {
      h.lo = 0.0;
      h.hi = 1.0;
      h.breakpoints = {0.0, 1.0};
      h.graded_points = {0.0, 1.0};
      const double s = a_ + b_;
      const double sd = std::sqrt(a_ * b_ / (s * s * (s + 1.0)));
      h.scale = sd * std::min({1.0, a_, b_});
      break;
    }
    case ParametricFamily::uniform:
      h.lo = a_;
      h.hi = b_;
      h.breakpoints = {a_, b_};
      break;
  }
  return h;
}

bool ParametricEstimate::square_integrable() const {
  // pdf ~ x^(shape-1) at 0 is square integrable iff shape > 1/2
  switch (family_) {
    case ParametricFamily::chisquare: return 0.5 * a_ > 0.5;
    case ParametricFamily::gamma: return a_ > 0.5;
    case ParametricFamily::beta: return a_ > 0.5 && b_ > 0.5;
    default: return true;
  }
}

// ---------------------------------------------------------------------------
// Density

Density::Density(Histogram h) : payload_(std::make_shared<const Payload>(std::move(h))) {}
Density::Density(KernelEstimate k) : payload_(std::make_shared<const Payload>(std::move(k))) {}
Density::Density(ParametricEstimate p) : payload_(std::make_shared<const Payload>(std::move(p))) {}
Density::Density(ReferenceDensity r) : payload_(std::make_shared<const Payload>(std::move(r))) {}

DensityKind Density::kind() const {
  return static_cast<DensityKind>(payload_->index());
}

double Density::eval(double x) const {
  return std::visit(
      [x](const auto& d) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, ReferenceDensity>) {
          return d.support.contains(x) ? d.pdf(x) : 0.0;
        } else {
          return d.eval(x);
        }
      },
      *payload_);
}

Eigen::VectorXd Density::eval(const Eigen::Ref<const Eigen::VectorXd>& xs) const {
  Eigen::VectorXd out(xs.size());
  if (const auto* k = as_kernel(); k && std::is_sorted(xs.begin(), xs.end())) {
    k->eval_sorted(xs, out);
    return out;
  }
  for (Eigen::Index i = 0; i < xs.size(); ++i) out(i) = eval(xs(i));
  return out;
}

Support Density::support() const {
  return std::visit(
      [](const auto& d) -> Support {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, ReferenceDensity>) {
          return d.support;
        } else {
          return d.support();
        }
      },
      *payload_);
}

QuadratureHints Density::hints() const {
  return std::visit(
      [](const auto& d) -> QuadratureHints {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, ReferenceDensity>) {
          return d.hints;
        } else {
          return d.hints();
        }
      },
      *payload_);
}

bool Density::square_integrable() const {
  if (const auto* p = as_parametric()) return p->square_integrable();
  if (const auto* r = as_reference()) return r->square_integrable;
  return true;
}

std::string Density::describe() const {
  std::ostringstream os;
  os.precision(6);
  if (const auto* h = as_histogram()) {
    os << "histogram(" << h->bins() << " bins on [" << h->breaks()(0) << ", "
       << h->breaks()(h->breaks().size() - 1) << "])";
  } else if (const auto* k = as_kernel()) {
    os << "gaussian-kernel(h=" << k->bandwidth() << ", n=" << k->centers().size() << ")";
  } else if (const auto* p = as_parametric()) {
    os << to_string(p->family()) << "(" << p->param(0);
    if (p->param_count() > 1) os << ", " << p->param(1);
    os << ")";
  } else {
    os << as_reference()->label;
  }
  return os.str();
}

double log_likelihood(const Density& f, const Eigen::VectorXd& x) {
  const Eigen::VectorXd v = f.eval(x);
  double total = 0.0;
  for (const double fi : v) {
    if (!(fi > 0.0)) return -kInf;
    total += std::log(fi);
  }
  return total;
}

}  // namespace tho
