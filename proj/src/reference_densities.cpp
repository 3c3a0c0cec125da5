#include "tho/reference_densities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tho {

namespace {

constexpr double kTailZ = 7.5;
constexpr double kCauchyBound = 20.0;

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

struct MixtureComponent {
  double weight;
  double mean;
  double sd;
};

BenchmarkDensity from_parametric(std::string label, const ParametricEstimate& p,
                                 std::function<double(double)> cdf, std::function<double(Rng&)> draw) {
  ReferenceDensity ref{label, [p](double x) { return p.eval(x); }, p.support(), p.hints(),
                       p.square_integrable()};
  return {std::move(label), Density(std::move(ref)), std::move(cdf), std::move(draw)};
}

BenchmarkDensity gaussian_mixture(std::string label, std::vector<MixtureComponent> parts) {
  double lo = kInf;
  double hi = -kInf;
  double scale = kInf;
  for (const auto& c : parts) {
    lo = std::min(lo, c.mean - kTailZ * c.sd);
    hi = std::max(hi, c.mean + kTailZ * c.sd);
    scale = std::min(scale, c.sd);
  }
  auto pdf = [parts](double x) {
    double s = 0.0;
    for (const auto& c : parts) s += c.weight * phi((x - c.mean) / c.sd) / c.sd;
    return s;
  };
  auto cdf = [parts](double x) {
    double s = 0.0;
    for (const auto& c : parts) s += c.weight * Phi((x - c.mean) / c.sd);
    return s;
  };
  auto draw = [parts](Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < parts.size(); ++k) {
      acc += parts[k].weight;
      if (u < acc) break;
    }
    return parts[k].mean + parts[k].sd * rng.normal();
  };
  QuadratureHints h;
  h.lo = lo;
  h.hi = hi;
  h.scale = scale;
  ReferenceDensity ref{label, pdf, Support{}, h, true};
  return {std::move(label), Density(std::move(ref)), cdf, draw};
}

std::vector<BenchmarkDensity> make_suite() {
  std::vector<BenchmarkDensity> suite;

  suite.push_back(from_parametric(
      "uniform", ParametricEstimate(ParametricFamily::uniform, 0.0, 1.0),
      [](double x) { return std::clamp(x, 0.0, 1.0); }, [](Rng& rng) { return rng.uniform(); }));

  suite.push_back(from_parametric(
      "exponential", ParametricEstimate(ParametricFamily::exponential, 1.0),
      [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }, [](Rng& rng) { return rng.exponential(); }));

  suite.push_back(from_parametric(
      "normal", ParametricEstimate(ParametricFamily::gaussian, 0.0, 1.0), Phi,
      [](Rng& rng) { return rng.normal(); }));

  suite.push_back(from_parametric(
      "lognormal", ParametricEstimate(ParametricFamily::lognormal, 0.0, 1.0),
      [](double x) { return x <= 0.0 ? 0.0 : Phi(std::log(x)); },
      [](Rng& rng) { return std::exp(rng.normal()); }));

  {
    QuadratureHints h;
    h.lo = std::log(2e-12);
    h.hi = -h.lo;
    h.breakpoints = {0.0};
    h.scale = 1.0;
    ReferenceDensity ref{"laplace", [](double x) { return 0.5 * std::exp(-std::abs(x)); }, Support{}, h, true};
    suite.push_back({"laplace", Density(std::move(ref)),
                     [](double x) { return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); },
                     [](Rng& rng) {
                       const double e = rng.exponential();
                       return rng.uniform() < 0.5 ? -e : e;
                     }});
  }

  {
    const double a = std::atan(kCauchyBound);
    QuadratureHints h;
    h.lo = -kCauchyBound;
    h.hi = kCauchyBound;
    h.breakpoints = {-kCauchyBound, kCauchyBound};
    h.scale = 1.0;
    ReferenceDensity ref{"cauchy_trunc",
                         [a](double x) { return std::abs(x) > kCauchyBound ? 0.0 : 1.0 / ((1.0 + x * x) * 2.0 * a); },
                         Support{-kCauchyBound, kCauchyBound}, h, true};
    suite.push_back({"cauchy_trunc", Density(std::move(ref)),
                     [a](double x) { return (std::atan(std::clamp(x, -kCauchyBound, kCauchyBound)) + a) / (2.0 * a); },
                     [a](Rng& rng) { return std::tan((2.0 * rng.uniform() - 1.0) * a); }});
  }

  suite.push_back(from_parametric(
      "beta22", ParametricEstimate(ParametricFamily::beta, 2.0, 2.0),
      [](double x) {
        const double t = std::clamp(x, 0.0, 1.0);
        return t * t * (3.0 - 2.0 * t);
      },
      [](Rng& rng) {
        // median of three uniforms
        std::array<double, 3> u{rng.uniform(), rng.uniform(), rng.uniform()};
        std::sort(u.begin(), u.end());
        return u[1];
      }));

  suite.push_back(from_parametric(
      "gamma2", ParametricEstimate(ParametricFamily::gamma, 2.0, 1.0),
      [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x) * (1.0 + x); },
      [](Rng& rng) { return rng.exponential() + rng.exponential(); }));

  suite.push_back(from_parametric(
      "chisq1", ParametricEstimate(ParametricFamily::chisquare, 1.0),
      [](double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); },
      [](Rng& rng) {
        const double z = rng.normal();
        return z * z;
      }));

  suite.push_back(gaussian_mixture("bimodal", {{0.5, -1.0, 2.0 / 3.0}, {0.5, 1.0, 2.0 / 3.0}}));
  suite.push_back(gaussian_mixture("claw3", {{0.5, 0.0, 1.0}, {0.25, -0.5, 0.1}, {0.25, 0.5, 0.1}}));

  {
    static const std::array<double, 5> breaks{0.0, 0.25, 0.5, 0.75, 1.0};
    static const std::array<double, 4> masses{0.1, 0.4, 0.2, 0.3};
    const Histogram shape(Eigen::Map<const Eigen::VectorXd>(breaks.data(), 5),
                          Eigen::Map<const Eigen::VectorXd>(masses.data(), 4));
    ReferenceDensity ref{"steps", [shape](double x) { return shape.eval(x); }, shape.support(), shape.hints(), true};
    suite.push_back({"steps", Density(std::move(ref)),
                     [](double x) {
                       double acc = 0.0;
                       for (std::size_t k = 0; k < masses.size(); ++k) {
                         if (x >= breaks[k + 1]) {
                           acc += masses[k];
                         } else if (x > breaks[k]) {
                           acc += masses[k] * (x - breaks[k]) / (breaks[k + 1] - breaks[k]);
                         }
                       }
                       return acc;
                     },
                     [](Rng& rng) {
                       const double u = rng.uniform();
                       double acc = 0.0;
                       std::size_t k = 0;
                       for (; k + 1 < masses.size(); ++k) {
                         acc += masses[k];
                         if (u < acc) break;
                       }
                       return breaks[k] + (breaks[k + 1] - breaks[k]) * rng.uniform();
                     }});
  }
  return suite;
}

}  // namespace

Eigen::VectorXd BenchmarkDensity::sample(Eigen::Index n, Rng& rng) const {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = draw(rng);
  return x;
}

const std::vector<BenchmarkDensity>& builtin_densities() {
  static const std::vector<BenchmarkDensity> suite = make_suite();
  return suite;
}

const BenchmarkDensity& builtin_density(const std::string& label) {
  for (const auto& d : builtin_densities()) {
    if (d.label == label) return d;
  }
  throw std::invalid_argument("unknown density: " + label);
}

}  // namespace tho
