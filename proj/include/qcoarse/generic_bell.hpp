#pragma once

// Generic dichotomic model on the infinite basis {|o_k>}: the entangled state
// (|o_n>|o_-n> + |o_-n>|o_n>)/sqrt(2), a fuzzy threshold measurement with
// discrete resolution delta, and Gaussian uncertainty Delta in the rotation
// angle that sets the measurement reference.

#include "qcoarse/error.hpp"
#include "qcoarse/kernel_quad.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace qcoarse {

struct GenericParams {
  int n = 1;           // |o_n> index, n >= 1
  double delta = 0.0;  // final-resolution std, index units
  double Delta = 0.0;  // reference std, radians

  void validate() const {
    if (n < 1) throw ValidationError("GenericParams: n must be >= 1, got " + std::to_string(n));
    if (!(delta >= 0.0) || !std::isfinite(delta))
      throw ValidationError("GenericParams: delta must be finite and >= 0");
    if (!(Delta >= 0.0) || !std::isfinite(Delta))
      throw ValidationError("GenericParams: Delta must be finite and >= 0");
  }
};

/// chi_j = +1 for j > 0, -1 for j <= 0.
constexpr int sign_profile(long j) { return j >= 1 ? 1 : -1; }

/// sum_k P_delta(k) chi_{m - k}: the mean outcome of the fuzzy threshold
/// measurement on |o_m>. delta == 0 is the sharp measurement.
inline double threshold_bias(int m, double delta) {
  if (delta == 0.0) return sign_profile(m);
  const int k_max = static_cast<int>(std::ceil(std::abs(m) + 8.0 * delta));
  const auto kernel = discrete_gaussian(delta, k_max);
  // chi_{m-k} = +1 iff k <= m - 1
  double plus = 0.0;
  double minus = 0.0;
  for (int k = -k_max; k <= k_max; ++k) (k <= m - 1 ? plus : minus) += kernel.weight(k);
  return plus - minus;
}

/// f_delta(m, theta) = sum_k P_delta(k) (cos^2 theta chi_{m-k} + sin^2 theta chi_{-m-k})
inline double f_delta(int m, double theta, const GenericParams& p) {
  if (m == 0) throw ValidationError("f_delta: |n| must be >= 1");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return c * c * threshold_bias(m, p.delta) + s * s * threshold_bias(-m, p.delta);
}

/// g_delta(m, theta) = sin theta cos theta sum_k P_delta(k) (chi_{m-k} - chi_{-m-k})
inline double g_delta(int m, double theta, const GenericParams& p) {
  if (m < 1) throw ValidationError("g_delta: n must be >= 1");
  return std::sin(theta) * std::cos(theta) *
         (threshold_bias(m, p.delta) - threshold_bias(-m, p.delta));
}

/// E_delta(theta_a, theta_b) with the threshold biases precomputed, for use
/// inside optimizer loops. Delta is ignored.
class FuzzyDetectorCorrelator {
 public:
  explicit FuzzyDetectorCorrelator(const GenericParams& p) {
    p.validate();
    bias_pos_ = threshold_bias(p.n, p.delta);
    bias_neg_ = threshold_bias(-p.n, p.delta);
  }

  // Per-party profile (f(n, theta), f(-n, theta), g(n, theta)).
  struct Profile {
    double f_pos;
    double f_neg;
    double g;
  };

  Profile profile(double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * c * bias_pos_ + s * s * bias_neg_, c * c * bias_neg_ + s * s * bias_pos_,
            s * c * (bias_pos_ - bias_neg_)};
  }

  static double combine(const Profile& a, const Profile& b) {
    return 0.5 * (a.f_pos * b.f_neg + a.f_neg * b.f_pos + 2.0 * a.g * b.g);
  }

  double operator()(double theta_a, double theta_b) const {
    return combine(profile(theta_a), profile(theta_b));
  }

 private:
  double bias_pos_ = 1.0;
  double bias_neg_ = -1.0;
};

inline double corr_fuzzy_detector(double theta_a, double theta_b, const GenericParams& p) {
  return FuzzyDetectorCorrelator(p)(theta_a, theta_b);
}

/// Closed form of the reference-coarsened correlator (delta = 0):
/// -exp(-4 Delta^2) cos[2 (theta_a + theta_b)]. Independent of n.
inline double corr_coarse_reference(double theta_a, double theta_b, const GenericParams& p) {
  p.validate();
  return -std::exp(-4.0 * p.Delta * p.Delta) * std::cos(2.0 * (theta_a + theta_b));
}

/// Same correlator evaluated as the 2-D Gaussian integral over both rotation
/// angles with a tensor Gauss-Hermite grid.
inline double corr_coarse_reference_quadrature(double theta_a, double theta_b,
                                               const GenericParams& p,
                                               int order = kDefaultHermiteOrder) {
  p.validate();
  if (p.Delta == 0.0) return -std::cos(2.0 * (theta_a + theta_b));
  const auto& rule = cached_gauss_hermite(order);
  const double scale = std::numbers::sqrt2 * p.Delta;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double phi_a = theta_a + scale * rule.nodes[i];
    double row = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double phi_b = theta_b + scale * rule.nodes[j];
      row += rule.weights[j] * std::cos(2.0 * (phi_a + phi_b));
    }
    acc += rule.weights[i] * row;
  }
  return -acc;
}

/// Both coarsenings at once: E_delta averaged over Gaussian reference noise
/// on each party. The tensor-product rule factorizes because E_delta is a sum
/// of products of single-party profiles.
class GenericCorrelator {
 public:
  explicit GenericCorrelator(const GenericParams& p, int order = kDefaultHermiteOrder)
      : detector_(p), delta_(p.Delta), rule_(&cached_gauss_hermite(order)) {}

  FuzzyDetectorCorrelator::Profile averaged_profile(double theta) const {
    if (delta_ == 0.0) return detector_.profile(theta);
    const double scale = std::numbers::sqrt2 * delta_;
    FuzzyDetectorCorrelator::Profile acc{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < rule_->nodes.size(); ++i) {
      const auto pr = detector_.profile(theta + scale * rule_->nodes[i]);
      const double w = rule_->weights[i];
      acc.f_pos += w * pr.f_pos;
      acc.f_neg += w * pr.f_neg;
      acc.g += w * pr.g;
    }
    return acc;
  }

  double operator()(double theta_a, double theta_b) const {
    return FuzzyDetectorCorrelator::combine(averaged_profile(theta_a), averaged_profile(theta_b));
  }

 private:
  FuzzyDetectorCorrelator detector_;
  double delta_;
  const QuadratureRule* rule_;
};

inline double corr_generic(double theta_a, double theta_b, const GenericParams& p,
                           int order = kDefaultHermiteOrder) {
  return GenericCorrelator(p, order)(theta_a, theta_b);
}

/// Error probability for telling |o_n> from |o_-n> with the fuzzy measurement,
/// 1 - [sum_k P_delta(k) chi_{n-k}]^2, taken literally. It tends to 1 (not 1/2)
/// as delta grows.
inline double discrimination_error(int n, double delta) {
  if (n < 1) throw ValidationError("discrimination_error: n must be >= 1");
  if (!(delta >= 0.0)) throw ValidationError("discrimination_error: delta must be >= 0");
  const double b = threshold_bias(n, delta);
  return 1.0 - b * b;
}

}  // namespace qcoarse
