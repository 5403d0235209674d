#pragma once

// Gaussian kernels (continuous and discrete), Gauss-Hermite quadrature against
// a normalized Gaussian weight, and the error function.

#include "qcoarse/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qcoarse {

/// Error function. Odd by construction; saturates to +-1 beyond |x| = 8,
/// where 1 - erf(x) < 1e-29.
inline double erf(double x) {
  const double ax = std::fabs(x);
  const double v = ax > 8.0 ? 1.0 : std::erf(ax);
  return std::signbit(x) ? -v : v;
}

/// Normalized Gaussian density with standard deviation `sigma` about `center`.
/// sigma == 0 is a point mass at `center`.
struct GaussianKernel {
  double center = 0.0;
  double sigma = 0.0;

  GaussianKernel(double center_, double sigma_) : center(center_), sigma(sigma_) {
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_))
      throw ValidationError("GaussianKernel: sigma must be finite and >= 0, got " +
                            std::to_string(sigma_));
  }

  bool is_point_mass() const { return sigma == 0.0; }

  /// Density at x. For the point mass this is 0 away from the center and
  /// +infinity on it.
  double operator()(double x) const {
    if (is_point_mass())
      return x == center ? std::numeric_limits<double>::infinity() : 0.0;
    const double z = (x - center) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  }
};

/// Discrete Gaussian P(k) on the integers |k| <= k_max, explicitly renormalized.
class DiscreteGaussianWeights {
 public:
  DiscreteGaussianWeights(int k_max, std::vector<double> weights)
      : k_max_(k_max), weights_(std::move(weights)) {}

  int k_max() const { return k_max_; }
  std::size_t size() const { return weights_.size(); }

  /// Weight of offset k; zero outside the truncated support.
  double weight(int k) const {
    if (k < -k_max_ || k > k_max_) return 0.0;
    return weights_[static_cast<std::size_t>(k + k_max_)];
  }

  std::vector<int> offsets() const {
    std::vector<int> out(weights_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i) - k_max_;
    return out;
  }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int k_max_;
  std::vector<double> weights_;  // index i <-> offset i - k_max
};

/// Below this sigma, exp(-1 / (2 sigma^2)) is under machine epsilon relative to
/// the k = 0 weight, so the discrete kernel is a point mass in double precision.
inline double discrete_point_mass_sigma() {
  static const double s =
      1.0 / std::sqrt(2.0 * std::log(1.0 / std::numeric_limits<double>::epsilon()));
  return s;
}

inline DiscreteGaussianWeights discrete_gaussian(double sigma, int k_max) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ValidationError("discrete_gaussian: sigma must be finite and > 0, got " +
                          std::to_string(sigma));
  if (k_max < 1)
    throw ValidationError("discrete_gaussian: k_max must be >= 1, got " + std::to_string(k_max));
  if (static_cast<double>(k_max) < 3.0 * sigma)
    throw ValidationError("discrete_gaussian: k_max = " + std::to_string(k_max) +
                          " truncates the kernel below 3 sigma (sigma = " + std::to_string(sigma) +
                          ")");

  const auto width = static_cast<std::size_t>(2 * k_max + 1);
  std::vector<double> w(width, 0.0);
  const auto mid = static_cast<std::size_t>(k_max);
  if (sigma < discrete_point_mass_sigma()) {
    w[mid] = 1.0;
    return {k_max, std::move(w)};
  }

  // Half-kernel first, then mirror, so the weights are exactly even in k.
  std::vector<double> half(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k)
    half[static_cast<std::size_t>(k)] = std::exp(-0.5 * (k / sigma) * (k / sigma));
  // Sum from the tails inward.
  double total = 0.0;
  for (int k = k_max; k >= 1; --k) total += 2.0 * half[static_cast<std::size_t>(k)];
  total += half[0];
  for (int k = 0; k <= k_max; ++k) {
    const double v = half[static_cast<std::size_t>(k)] / total;
    w[mid + static_cast<std::size_t>(k)] = v;
    w[mid - static_cast<std::size_t>(k)] = v;
  }
  return {k_max, std::move(w)};
}

/// Gauss-Hermite rule normalized to the unit Gaussian: for a kernel of
/// standard deviation Delta about theta0,
///   integral P_Delta(theta - theta0) f(theta) dtheta
///     ~= sum_i weights[i] * f(theta0 + sqrt(2) * Delta * nodes[i]).
/// nodes are the roots of H_order; weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
};

inline constexpr int kMaxHermiteOrder = 128;
inline constexpr int kDefaultHermiteOrder = 40;

inline QuadratureRule gauss_hermite(int order) {
  if (order < 1 || order > kMaxHermiteOrder)
    throw ValidationError("gauss_hermite: order must lie in [1, " +
                          std::to_string(kMaxHermiteOrder) + "], got " + std::to_string(order));

  // Newton iteration on orthonormal Hermite functions with the usual
  // asymptotic root guesses, largest root first.
  const int n = order;
  const int half = (n + 1) / 2;
  std::vector<long double> roots(static_cast<std::size_t>(half));
  std::vector<long double> wts(static_cast<std::size_t>(half));
  const long double pim4 = std::pow(std::numbers::pi_v<long double>, -0.25L);
  long double z = 0.0L;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(static_cast<long double>(2 * n + 1)) -
          1.85575L * std::pow(static_cast<long double>(2 * n + 1), -0.16667L);
    } else if (i == 1) {
      z -= 1.14L * std::pow(static_cast<long double>(n), 0.426L) / z;
    } else if (i == 2) {
      z = 1.86L * z - 0.86L * roots[0];
    } else if (i == 3) {
      z = 1.91L * z - 0.91L * roots[1];
    } else {
      z = 2.0L * z - roots[static_cast<std::size_t>(i - 2)];
    }
    long double pp = 0.0L;
    bool done = false;
    for (int it = 0; it < 100 && !done; ++it) {
      long double p1 = pim4;
      long double p2 = 0.0L;
      for (int j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / j) * p2 - std::sqrt(static_cast<long double>(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0L * n) * p2;
      const long double z1 = z;
      z = z1 - p1 / pp;
      done = std::fabs(z - z1) <= 1e-17L * std::max(1.0L, std::fabs(z));
    }
    if (!done) throw ConvergenceError("gauss_hermite: Newton iteration failed for order " +
                                      std::to_string(order));
    roots[static_cast<std::size_t>(i)] = z;
    wts[static_cast<std::size_t>(i)] = 2.0L / (pp * pp);
  }

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < half; ++i) {
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = static_cast<double>(-roots[lo]);
    rule.nodes[hi] = static_cast<double>(roots[lo]);
    rule.weights[lo] = static_cast<double>(wts[lo]);
    rule.weights[hi] = static_cast<double>(wts[lo]);
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(half - 1)] = 0.0;

  long double total = 0.0L;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w = static_cast<double>(w / total);
  return rule;
}

/// Process-wide cache of rules; construction is O(order^2) but callers in
/// optimizer loops should not pay it repeatedly.
inline const QuadratureRule& cached_gauss_hermite(int order) {
  static std::array<std::optional<QuadratureRule>, kMaxHermiteOrder + 1> cache;
  static std::mutex mutex;
  if (order < 1 || order > kMaxHermiteOrder) (void)gauss_hermite(order);  // throws
  std::lock_guard lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(order)];
  if (!slot) slot = gauss_hermite(order);
  return *slot;
}

/// integral P_Delta(theta - center) f(theta) dtheta. Delta == 0 returns f(center).
template <typename F>
double coarsen_expectation(F&& f, double center, double Delta, const QuadratureRule& rule) {
  if (!(Delta >= 0.0))
    throw ValidationError("coarsen_expectation: Delta must be >= 0, got " + std::to_string(Delta));
  if (Delta == 0.0) return static_cast<double>(f(center));
  const double scale = std::numbers::sqrt2 * Delta;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * static_cast<double>(f(center + scale * rule.nodes[i]));
  return acc;
}

/// Doubles the Gauss-Hermite order from `start_order` (capped at the maximum)
/// until two successive estimates differ by less than `tol`.
template <typename F>
double coarsen_expectation_adaptive(F&& f, double center, double Delta, double tol = 1e-10,
                                    int start_order = kDefaultHermiteOrder) {
  if (Delta == 0.0) return coarsen_expectation(f, center, Delta, cached_gauss_hermite(1));
  int order = std::clamp(start_order, 1, kMaxHermiteOrder);
  double prev = coarsen_expectation(f, center, Delta, cached_gauss_hermite(order));
  while (order < kMaxHermiteOrder) {
    order = std::min(2 * order, kMaxHermiteOrder);
    const double next = coarsen_expectation(f, center, Delta, cached_gauss_hermite(order));
    if (std::fabs(next - prev) < tol) return next;
    prev = next;
  }
  throw ConvergenceError("coarsen_expectation_adaptive: no convergence to " + std::to_string(tol) +
                         " by order " + std::to_string(kMaxHermiteOrder) +
                         " (Delta = " + std::to_string(Delta) + ")");
}

}  // namespace qcoarse
