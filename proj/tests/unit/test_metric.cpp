#include "helpers.hpp"

#include "tho/metric.hpp"
#include "tho/quadrature.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace tho;
using tho::testing::random_histogram;
using tho::testing::step_histogram;
using tho::testing::uniform;

namespace {

// Same histogram, but integrated numerically instead of through the merged partition.
Density as_reference(const Histogram& h) {
  return Density(ReferenceDensity{"ref", [h](double x) { return h.eval(x); }, h.support(), h.hints(), true});
}

}  // namespace

TEST(Hellinger, UniformExamples) {
  EXPECT_EQ(hellinger_sq(uniform(0, 1), uniform(0, 1)), 0.0);
  EXPECT_NEAR(hellinger_sq(uniform(0, 1), uniform(2, 3)), 1.0, 1e-12);
  EXPECT_NEAR(hellinger_sq(uniform(0, 1), uniform(0, 2)), 0.292893218813452475599, 1e-10);
}

TEST(Hellinger, HistogramClosedForm) {
  const Histogram f = step_histogram({0, 1}, {1});
  const Histogram g = step_histogram({0, 2}, {1});
  EXPECT_NEAR(hellinger_sq(f, g), 1.0 - 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(hellinger_sq(f, step_histogram({2, 3}, {1})), 1.0, 1e-15);
}

TEST(Hellinger, GaussianPair) {
  // h^2 = 1 - exp(-(m1 - m2)^2 / (4 (s1^2 + s2^2))) sqrt(2 s1 s2 / (s1^2 + s2^2))
  const Density a(ParametricEstimate(ParametricFamily::gaussian, 0.0, 1.0));
  const Density b(ParametricEstimate(ParametricFamily::gaussian, 1.0, 2.0));
  const double expected = 1.0 - std::exp(-1.0 / 20.0) * std::sqrt(4.0 / 5.0);
  EXPECT_NEAR(hellinger_sq(a, b), expected, 1e-10);
}

TEST(Hellinger, SingularDensity) {
  // chi-square(1) against exponential(1/2) = chi-square(2): closed form via Bhattacharyya coefficient
  const Density a(ParametricEstimate(ParametricFamily::chisquare, 1.0));
  const Density b(ParametricEstimate(ParametricFamily::chisquare, 2.0));
  // BC = integral of x^{-1/4} e^{-x/2} / sqrt(2 sqrt(2 pi)) = Gamma(3/4) 2^{3/4} / sqrt(2 sqrt(2 pi))
  const double bc = std::tgamma(0.75) * std::pow(2.0, 0.75) / std::sqrt(2.0 * std::sqrt(2.0 * M_PI));
  EXPECT_NEAR(hellinger_sq(a, b), 1.0 - bc, 1e-8);
}

TEST(Lq, UniformExamples) {
  EXPECT_EQ(lq_distance(uniform(0, 1), uniform(0, 1), 1), 0.0);
  EXPECT_NEAR(lq_distance(uniform(0, 1), uniform(0, 2), 1), 1.0, 1e-10);
  EXPECT_NEAR(lq_distance(uniform(0, 1), uniform(0, 2), 2), 0.5, 1e-10);
  EXPECT_THROW(lq_distance(uniform(0, 1), uniform(0, 2), 3), std::invalid_argument);
  const Density chi(ParametricEstimate(ParametricFamily::chisquare, 1.0));
  EXPECT_EQ(lq_distance(chi, uniform(0, 1), 2), kInf);
}

TEST(SqL2, Examples) {
  EXPECT_NEAR(sq_l2_norm(uniform(0, 1)), 1.0, 1e-12);
  EXPECT_NEAR(sq_l2_norm(uniform(0, 2)), 0.5, 1e-12);
  EXPECT_NEAR(sq_l2_norm(Density(ParametricEstimate(ParametricFamily::gaussian, 0.0, 1.0))),
              0.28209479177387814347, 1e-10);
  EXPECT_DOUBLE_EQ(sq_l2_norm(step_histogram({0, 1, 3}, {0.5, 0.5})), 0.25 + 0.125);
}

TEST(Metric, ClosedFormMatchesQuadrature) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Histogram f = random_histogram(rng, -1.0, 1.0 + rng.uniform());
    const Histogram g = random_histogram(rng, -0.5 * rng.uniform(), 2.0);
    EXPECT_NEAR(hellinger_sq(f, g), hellinger_sq(as_reference(f), as_reference(g)), 1e-8);
    EXPECT_NEAR(lq_distance(f, g, 1), lq_distance(as_reference(f), as_reference(g), 1), 1e-8);
    EXPECT_NEAR(lq_distance(f, g, 2), lq_distance(as_reference(f), as_reference(g), 2), 1e-8);
  }
}

TEST(Metric, SymmetryRangeTriangle) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const Density f(random_histogram(rng, 0.0, 1.0));
    const Density g(random_histogram(rng, 0.2, 1.5));
    const Density k(random_histogram(rng, -0.3, 0.9));
    const double fg = hellinger_sq(f, g);
    EXPECT_EQ(fg, hellinger_sq(g, f));
    EXPECT_GE(fg, 0.0);
    EXPECT_LE(fg, 1.0 + 1e-10);
    EXPECT_LE(std::sqrt(fg), std::sqrt(hellinger_sq(f, k)) + std::sqrt(hellinger_sq(k, g)) + 1e-6);
  }
}

TEST(Metric, QuadratureSymmetricForMixedPairs) {
  Rng rng(9);
  const Density k(KernelEstimate(tho::testing::normal_sample(rng, 40), 0.4));
  const Density p(ParametricEstimate(ParametricFamily::gamma, 2.0, 1.5));
  EXPECT_EQ(hellinger_sq(k, p), hellinger_sq(p, k));
  EXPECT_EQ(lq_distance(k, p, 1), lq_distance(p, k, 1));
}

TEST(Quadrature, SimpsonExactOnCubics) {
  EXPECT_NEAR(simpson([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0, 2), 4.0 - 4.0 + 2.0, 1e-14);
}

TEST(Quadrature, SpecValidation) {
  QuadratureSpec s;
  s.panels = 3;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.panels = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.panels = 2;
  EXPECT_NO_THROW(s.validate());
}

TEST(Quadrature, ReportsNonConvergence) {
  // a 1/sqrt(|x|) spike in the middle of a segment, with refinement disabled
  const Density spike(ReferenceDensity{"spike",
                                       [](double x) { return std::abs(x) < 1.0 ? 0.25 / std::sqrt(std::abs(x)) : 0.0; },
                                       Support{-1.0, 1.0},
                                       QuadratureHints{-1.0, 1.0, {}, {}, 1.0},
                                       false});
  QuadratureSpec s;
  s.max_refinements = 0;
  s.panels = 4;
  s.uniform_cuts = 1;
  try {
    total_mass(spike, s);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_GT(e.residual(), s.max_residual);
  }
}

TEST(Quadrature, SharedGridCoversEveryMember) {
  const Density a(ParametricEstimate(ParametricFamily::beta, 0.6, 0.8));
  const Density b(step_histogram({0.1, 0.4, 0.9}, {0.2, 0.8}));
  const std::array<const Density*, 2> members{&a, &b};
  const SampledGrid g = sample_on_grid(members, QuadratureSpec{});
  EXPECT_NEAR(g.grid.weights.dot(g.values.col(0)), 1.0, 1e-8);
  EXPECT_NEAR(g.grid.weights.dot(g.values.col(1)), 1.0, 1e-12);
}

TEST(Quadrature, HeavyTailedLognormal) {
  const Density wide(ParametricEstimate(ParametricFamily::lognormal, -1.25, 1.94));
  EXPECT_NEAR(total_mass(wide), 1.0, 1e-8);
  const Density chi(ParametricEstimate(ParametricFamily::chisquare, 1.0));
  const double h2 = hellinger_sq(wide, chi);
  EXPECT_GT(h2, 0.0);
  EXPECT_LT(h2, 1.0);
}

TEST(Quadrature, SampleBudget) {
  const Density a(ParametricEstimate(ParametricFamily::gaussian, 0.0, 1.0));
  const Density b(ParametricEstimate(ParametricFamily::gaussian, 1.0, 2.0));
  QuadratureSpec s;
  s.max_samples = 100;
  EXPECT_THROW(hellinger_sq(a, b, s), QuadratureError);
  s.max_samples = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}
