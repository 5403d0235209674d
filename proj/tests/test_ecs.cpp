#include "qcoarse/ecs.hpp"
#include "qcoarse/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qcoarse;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

// Composite trapezoid rule with `points` nodes on [-12 Delta, 12 Delta].
double trapezoid_homodyne(double alpha, double Delta, int points) {
  const double a = -12.0 * Delta;
  const double h = 24.0 * Delta / (points - 1);
  double acc = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    acc += w * homodyne_angle_integrand(a + i * h, alpha, Delta);
  }
  return acc * h;
}

}  // namespace

TEST(EcsEfficiency, SaturatedAmplitude) {
  EXPECT_NEAR(ecs_efficiency_amplitude({30.0, 1.0, 0.0}), 1.0, 1e-12);
  const auto opt = maximize_chsh(EcsCorrelator(ecs_efficiency_amplitude({30.0, 1.0, 0.0})));
  EXPECT_NEAR(opt.result.value, kTsirelson, 1e-8);
}

TEST(EcsEfficiency, ClosedForm) {
  const EcsParams p{0.8, 0.6, 0.0};
  const double e = std::erf(std::sqrt(2 * 0.6) * 0.8);
  const double amp = e * e / (1 + std::exp(-4 * 0.64));
  EXPECT_NEAR(corr_ecs_efficiency(0.3, 0.3, p), amp, 1e-15);
  EXPECT_GT(corr_ecs_efficiency(0.3, 0.3, p), 0.0);
  EXPECT_NEAR(corr_ecs_efficiency(0.5, 0.1, p), amp * std::cos(0.8), 1e-15);
}

TEST(EcsEfficiency, RecoversWithAlpha) {
  double prev = 0.0;
  for (double alpha : {1.0, 2.0, 5.0, 10.0, 30.0}) {
    const double b = maximize_chsh(EcsCorrelator(ecs_efficiency_amplitude({alpha, 0.05, 0.0}))).result.value;
    EXPECT_GT(b, prev);
    prev = b;
  }
  EXPECT_NEAR(prev, kTsirelson, 1e-6);
}

TEST(EcsReference, ClosedForm) {
  EXPECT_NEAR(corr_ecs_reference(0.2, 0.7, {3.0, 1.0, 0.0}), corr_ecs_efficiency(0.2, 0.7, {3.0, 1.0, 0.0}), 1e-12);
  EXPECT_NEAR(corr_ecs_reference(0.2, 0.7, {0.4, 0.2, 0.0}), corr_ecs_efficiency(0.2, 0.7, {0.4, 1.0, 0.0}), 1e-12);
  const double e = std::erf(std::numbers::sqrt2 * 10.0);
  const auto opt = maximize_chsh(EcsCorrelator(ecs_reference_amplitude({10.0, 1.0, 0.5})));
  EXPECT_NEAR(opt.result.value, kTsirelson * std::exp(-1.0) * e * e, 1e-8);
  EXPECT_NEAR(opt.result.value, 1.0405, 5e-5);
}

TEST(EcsReference, AlphaIndependentWhenSaturated) {
  for (double V : {0.0, 0.1, 0.4, 1.0}) {
    const double a5 = ecs_reference_amplitude({5.0, 1.0, std::sqrt(V)});
    EXPECT_NEAR(ecs_reference_amplitude({10.0, 1.0, std::sqrt(V)}), a5, 1e-12);
    EXPECT_NEAR(ecs_reference_amplitude({30.0, 1.0, std::sqrt(V)}), a5, 1e-12);
  }
}

TEST(EcsHomodyne, PointMassLimit) {
  EXPECT_EQ(homodyne_angle_integral(5.0, 0.0), std::erf(std::numbers::sqrt2 * 5.0));
  EXPECT_NEAR(corr_ecs_homodyne_angle(0.1, 0.4, {5.0, 1.0, 0.0}), corr_ecs_reference(0.1, 0.4, {5.0, 1.0, 0.0}),
              1e-12);
  EXPECT_NEAR(homodyne_angle_integral(5.0, 1e-6), homodyne_angle_integral(5.0, 0.0), 1e-9);
}

TEST(EcsHomodyne, DenseTrapezoidOracle) {
  const double adaptive = homodyne_angle_integral(5.0, 0.3);
  const double dense = trapezoid_homodyne(5.0, 0.3, 100000);
  EXPECT_NEAR(adaptive, dense, 1e-7);
}

TEST(EcsHomodyne, IntegrandIsSignedErfProfile) {
  const double D = 0.4;
  for (double l : {-1.0, -0.2, 0.3, 1.2, 2.0}) {
    const double p = std::exp(-l * l / (2 * D * D)) / (D * std::sqrt(2 * kPi));
    EXPECT_NEAR(homodyne_angle_integrand(l, 2.0, D), p * std::erf(std::numbers::sqrt2 * 2.0 * std::cos(l)), 1e-14);
  }
  EXPECT_EQ(homodyne_angle_integrand(kPi / 2, 2.0, D), 0.0);
}

// Large-alpha limit: the integrand tends to P_D(l) sign(cos l), whose
// integral is an alternating sum of Gaussian interval probabilities.
double sign_limit_amplitude(double Delta) {
  const double s = Delta * std::numbers::sqrt2;
  double acc = std::erf(kPi / 2 / s);
  for (int k = 1; k < 50; ++k) {
    const double lo = (k - 0.5) * kPi, hi = (k + 0.5) * kPi;
    acc += (k % 2 ? -1.0 : 1.0) * (std::erf(hi / s) - std::erf(lo / s));
  }
  return acc * acc;
}

TEST(EcsHomodyne, ApproachesSignLimitWithAlpha) {
  double prev = 2.0;
  for (double V : {0.2, 0.5, 1.0}) {
    const double limit = sign_limit_amplitude(std::sqrt(V));
    double prev_gap = 1.0;
    for (double alpha : {5.0, 10.0, 30.0, 100.0}) {
      const double gap = std::fabs(ecs_homodyne_amplitude({alpha, 1.0, std::sqrt(V)}) - limit);
      EXPECT_LT(gap, prev_gap) << "V " << V << " alpha " << alpha;
      prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 5e-3) << "V " << V;
    EXPECT_LT(limit, prev);
    prev = limit;
  }
}

TEST(EcsHomodyne, ReportsNonConvergence) {
  EXPECT_THROW(homodyne_angle_integral(5.0, 0.3, 1e-30), ConvergenceError);
}

TEST(EcsOracle, MatchesClosedForm) {
  for (double alpha : {2.0, 5.0})
    for (double a : {0.0, 0.5, 1.3})
      for (double b : {0.0, 0.8, 2.1})
        EXPECT_NEAR(oracle_ecs_quadrature(a, b, {alpha, 1.0, 0.0}), corr_ecs_efficiency(a, b, {alpha, 1.0, 0.0}),
                    1e-6)
            << alpha << " " << a << " " << b;
}

TEST(EcsOracle, Examples) {
  EXPECT_NEAR(oracle_ecs_quadrature(0.0, 0.0, {5.0, 1.0, 0.0}), corr_ecs_efficiency(0.0, 0.0, {5.0, 1.0, 0.0}), 1e-6);
  EXPECT_NEAR(oracle_ecs_quadrature(kPi / 4, 0.0, {5.0, 1.0, 0.0}), 0.0, 1e-6);
  for (double a : {0.0, 0.7})
    EXPECT_NEAR(oracle_ecs_statistics(a, 0.2, 2.0).total(), 1.0, 1e-10);
  EXPECT_THROW(oracle_ecs_statistics(0.0, 0.0, 12.0), ValidationError);
}

TEST(EcsAmplitude, Monotone) {
  for (double alpha : {0.5, 1.0, 3.0}) {
    double prev = -1.0;
    for (double eta = 0.0; eta <= 1.0; eta += 0.05) {
      const double a = ecs_efficiency_amplitude({alpha, eta, 0.0});
      EXPECT_GE(a, prev - 1e-15);
      EXPECT_LE(std::fabs(a), 1.0);
      prev = a;
    }
  }
  for (double eta : {0.05, 0.5, 1.0}) {
    double prev = -1.0;
    for (double alpha = 0.25; alpha <= 30.0; alpha *= 1.5) {
      const double a = ecs_efficiency_amplitude({alpha, eta, 0.0});
      EXPECT_GE(a, prev - 1e-15);
      prev = a;
    }
  }
  double prev_ref = 2.0;
  double prev_hom = 2.0;
  for (double D = 0.0; D <= 1.0; D += 0.1) {
    const double r = ecs_reference_amplitude({2.0, 1.0, D});
    const double h = ecs_homodyne_amplitude({2.0, 1.0, D});
    EXPECT_LE(r, prev_ref + 1e-15);
    EXPECT_LE(h, prev_hom + 1e-12);
    prev_ref = r;
    prev_hom = h;
  }
}

TEST(EcsCorrelator, OptimizedChshIsScaledTsirelson) {
  for (const EcsParams& p : {EcsParams{1.0, 0.3, 0.0}, EcsParams{5.0, 1.0, 0.4}, EcsParams{0.7, 1.0, 0.9}}) {
    for (double amp : {ecs_efficiency_amplitude(p), ecs_reference_amplitude(p), ecs_homodyne_amplitude(p)}) {
      const auto opt = maximize_chsh(EcsCorrelator(amp));
      EXPECT_NEAR(opt.result.value, kTsirelson * std::fabs(amp), 1e-8);
    }
  }
}

TEST(EcsParams, Validation) {
  EXPECT_THROW(EcsParams({0.0, 1.0, 0.0}).validate(), ValidationError);
  EXPECT_THROW(EcsParams({1.0, 1.5, 0.0}).validate(), ValidationError);
  EXPECT_THROW(EcsParams({1.0, 1.0, -1.0}).validate(), ValidationError);
  EXPECT_THROW(corr_ecs_homodyne_angle(0.0, 0.0, {-1.0, 1.0, 0.1}), ValidationError);
}
