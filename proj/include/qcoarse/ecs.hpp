#pragma once

// Entangled coherent state N(|a,a> + |-a,-a>) measured by sign-binned
// homodyne detection after ideal rotations in span{|a>, |-a>}.

#include "qcoarse/error.hpp"
#include "qcoarse/kernel_quad.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace qcoarse {

struct EcsParams {
  double alpha = 5.0;  // real coherent amplitude
  double eta = 1.0;    // homodyne efficiency
  double Delta = 0.0;  // reference std, radians

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw ValidationError("EcsParams: alpha must be finite and > 0, got " + std::to_string(alpha));
    if (!(eta >= 0.0 && eta <= 1.0))
      throw ValidationError("EcsParams: eta must lie in [0, 1], got " + std::to_string(eta));
    if (!(Delta >= 0.0) || !std::isfinite(Delta))
      throw ValidationError("EcsParams: Delta must be finite and >= 0");
  }
};

/// 1 / (1 + exp(-4 alpha^2)); the exponential is dropped once it is below
/// double resolution.
inline double ecs_overlap_factor(double alpha) {
  const double x = 4.0 * alpha * alpha;
  return x > 40.0 ? 1.0 : 1.0 / (1.0 + std::exp(-x));
}

inline double ecs_efficiency_amplitude(const EcsParams& p) {
  p.validate();
  const double e = qcoarse::erf(std::sqrt(2.0 * p.eta) * p.alpha);
  return e * e * ecs_overlap_factor(p.alpha);
}

inline double corr_ecs_efficiency(double theta_a, double theta_b, const EcsParams& p) {
  return ecs_efficiency_amplitude(p) * std::cos(2.0 * (theta_a - theta_b));
}

inline double ecs_reference_amplitude(const EcsParams& p) {
  p.validate();
  const double e = qcoarse::erf(std::numbers::sqrt2 * p.alpha);
  return std::exp(-4.0 * p.Delta * p.Delta) * e * e / (1.0 + std::exp(-4.0 * p.alpha * p.alpha));
}

inline double corr_ecs_reference(double theta_a, double theta_b, const EcsParams& p) {
  return ecs_reference_amplitude(p) * std::cos(2.0 * (theta_a - theta_b));
}

inline constexpr double kHomodyneTolerance = 1e-9;

/// Integrand of the homodyne-angle average, in unsimplified form:
///   exp(-l^2 / 2D^2) a cos(l) erf[sqrt(a^2 (1 + cos 2l))] / (D sqrt(2 pi a^2 cos^2 l)).
/// It equals P_D(l) erf(sqrt(2) a cos l); near cos l = 0 it is set to its
/// limit 0.
inline double homodyne_angle_integrand(double lambda, double alpha, double Delta) {
  const double c = std::cos(lambda);
  if (std::fabs(c) < 1e-8) return 0.0;
  const double gauss = std::exp(-lambda * lambda / (2.0 * Delta * Delta));
  const double arg = std::sqrt(std::max(0.0, alpha * alpha * (1.0 + std::cos(2.0 * lambda))));
  return gauss * alpha * c * qcoarse::erf(arg) /
         (Delta * std::sqrt(2.0 * std::numbers::pi * alpha * alpha * c * c));
}

/// I(alpha, Delta) = integral over the homodyne angle of the integrand above,
/// by adaptive Gauss-Kronrod on [-12 Delta, 12 Delta] split at the zeros of
/// cos. Throws ConvergenceError if the error estimate exceeds `tol`.
inline double homodyne_angle_integral(double alpha, double Delta, double tol = kHomodyneTolerance) {
  EcsParams{alpha, 1.0, Delta}.validate();
  if (Delta == 0.0) return qcoarse::erf(std::numbers::sqrt2 * alpha);

  // Integrate in u = l / Delta so the integrand stays O(1) however small Delta is.
  constexpr double half_width = 12.0;
  std::vector<double> cuts{-half_width};
  const double half_pi = 0.5 * std::numbers::pi;
  const int k_max = static_cast<int>(std::ceil(half_width * Delta / std::numbers::pi)) + 1;
  for (int k = -k_max; k <= k_max; ++k) {
    const double z = (half_pi + k * std::numbers::pi) / Delta;
    if (z > -half_width && z < half_width) cuts.push_back(z);
  }
  cuts.push_back(half_width);

  auto f = [&](double u) { return Delta * homodyne_angle_integrand(Delta * u, alpha, Delta); };
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, cuts[i], cuts[i + 1], 15, 1e-11, &err);
    total_err += err;
  }
  if (!(total_err <= tol))
    throw ConvergenceError("homodyne_angle_integral: error estimate " + std::to_string(total_err) +
                           " exceeds " + std::to_string(tol) + " (alpha = " + std::to_string(alpha) +
                           ", Delta = " + std::to_string(Delta) + ")");
  return total;
}

inline double ecs_homodyne_amplitude(const EcsParams& p) {
  p.validate();
  const double i = homodyne_angle_integral(p.alpha, p.Delta);
  return i * i * ecs_overlap_factor(p.alpha);
}

inline double corr_ecs_homodyne_angle(double theta_a, double theta_b, const EcsParams& p) {
  return ecs_homodyne_amplitude(p) * std::cos(2.0 * (theta_a - theta_b));
}

/// A * cos[2 (theta_a - theta_b)] with the amplitude computed once.
class EcsCorrelator {
 public:
  explicit EcsCorrelator(double amplitude) : amplitude_(amplitude) {}
  double amplitude() const { return amplitude_; }
  double operator()(double theta_a, double theta_b) const {
    return amplitude_ * std::cos(2.0 * (theta_a - theta_b));
  }

 private:
  double amplitude_;
};

inline constexpr double kEcsOracleMaxAlpha = 10.0;

/// Joint sign statistics of ideal homodyne detection, computed from the
/// coherent-state wavefunctions <x|+-a> = pi^{-1/4} exp(-(x -+ sqrt(2) a)^2 / 2)
/// without using erf.
struct EcsSignStatistics {
  std::array<std::array<double, 2>, 2> p{};  // p[sa][sb], index 0 <-> outcome +1
  double total() const { return p[0][0] + p[0][1] + p[1][0] + p[1][1]; }
  double correlation() const { return p[0][0] + p[1][1] - p[0][1] - p[1][0]; }
};

/// Independent route to the eta = 1 correlator. Each party's rotation acts as
/// |a> -> cos t |a> + sin t |-a>, |-a> -> sin t |a> - cos t |-a> on the
/// (nonorthogonal) coherent pair; projector matrix elements onto x > 0 and
/// x < 0, cross terms included, come from numerical integration of the
/// wavefunction products.
inline EcsSignStatistics oracle_ecs_statistics(double theta_a, double theta_b, double alpha) {
  if (!(alpha > 0.0))
    throw ValidationError("oracle_ecs_quadrature: alpha must be > 0");
  if (alpha > kEcsOracleMaxAlpha)
    throw ValidationError("oracle_ecs_quadrature: alpha = " + std::to_string(alpha) +
                          " too large for stable cross-term arithmetic (max " +
                          std::to_string(kEcsOracleMaxAlpha) + ")");

  const double shift = std::numbers::sqrt2 * alpha;
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  // Labels: 0 <-> |+a>, 1 <-> |-a>. proj[o][s][t] = <s| Pi_o |t>.
  std::array<std::array<std::array<double, 2>, 2>, 2> proj{};
  const std::array<double, 2> centers{shift, -shift};
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      auto prod = [&](double x) {
        const double u = x - centers[static_cast<std::size_t>(s)];
        const double v = x - centers[static_cast<std::size_t>(t)];
        return norm * std::exp(-0.5 * (u * u + v * v));
      };
      // Split at the Gaussian peak so the adaptive rule sees it.
      const double peak = 0.5 * (centers[static_cast<std::size_t>(s)] + centers[static_cast<std::size_t>(t)]);
      double pos = 0.0;
      double neg = 0.0;
      if (peak > 0.0) {
        pos = GK::integrate(prod, 0.0, peak, 15, 1e-15) + GK::integrate(prod, peak, inf, 15, 1e-15);
        neg = GK::integrate(prod, -inf, 0.0, 15, 1e-15);
      } else if (peak < 0.0) {
        neg = GK::integrate(prod, -inf, peak, 15, 1e-15) + GK::integrate(prod, peak, 0.0, 15, 1e-15);
        pos = GK::integrate(prod, 0.0, inf, 15, 1e-15);
      } else {
        pos = GK::integrate(prod, 0.0, inf, 15, 1e-15);
        neg = GK::integrate(prod, -inf, 0.0, 15, 1e-15);
      }
      proj[0][static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = pos;
      proj[1][static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = neg;
    }
  }

  // Single-party rotation matrix R[new][old].
  auto rotation = [](double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    return std::array<std::array<double, 2>, 2>{{{c, s}, {s, -c}}};
  };
  const auto ra = rotation(theta_a);
  const auto rb = rotation(theta_b);
  // Coefficients on |s_a, s_b> of U_a U_b (|a,a> + |-a,-a>), unnormalized.
  std::array<std::array<double, 2>, 2> coef{};
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      coef[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          ra[0][static_cast<std::size_t>(s)] * rb[0][static_cast<std::size_t>(t)] +
          ra[1][static_cast<std::size_t>(s)] * rb[1][static_cast<std::size_t>(t)];

  auto bilinear = [&](const auto& pa, const auto& pb) {
    double acc = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        for (int u = 0; u < 2; ++u)
          for (int v = 0; v < 2; ++v)
            acc += coef[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] *
                   coef[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] *
                   pa[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)] *
                   pb[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)];
    return acc;
  };

  std::array<std::array<double, 2>, 2> gram{};
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      gram[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          proj[0][static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] +
          proj[1][static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
  const double state_norm = bilinear(gram, gram);

  EcsSignStatistics stats;
  for (int oa = 0; oa < 2; ++oa)
    for (int ob = 0; ob < 2; ++ob)
      stats.p[static_cast<std::size_t>(oa)][static_cast<std::size_t>(ob)] =
          bilinear(proj[static_cast<std::size_t>(oa)], proj[static_cast<std::size_t>(ob)]) /
          state_norm;
  return stats;
}

inline double oracle_ecs_quadrature(double theta_a, double theta_b, const EcsParams& p) {
  p.validate();
  return oracle_ecs_statistics(theta_a, theta_b, p.alpha).correlation();
}

}  // namespace qcoarse
