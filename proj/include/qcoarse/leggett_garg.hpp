#pragma once

// Two-time parity correlators of spin-j systems with a Gaussian-uncertain
// evolution time, and the Leggett-Garg combination K.

#include "qcoarse/error.hpp"
#include "qcoarse/kernel_quad.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace qcoarse {

struct SpinParams {
  double j = 0.5;      // spin, half-integer >= 1/2
  double Delta = 0.0;  // std of the rotation angle omega*t, radians
  double omega = 1.0;  // angular frequency

  int two_j() const { return static_cast<int>(std::lround(2.0 * j)); }

  void validate() const {
    const double tj = 2.0 * j;
    if (!(tj >= 1.0) || std::fabs(tj - std::round(tj)) > 1e-12)
      throw ValidationError("SpinParams: j must be a positive half-integer, got " + std::to_string(j));
    if (!(Delta >= 0.0) || !std::isfinite(Delta))
      throw ValidationError("SpinParams: Delta must be finite and >= 0");
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw ValidationError("SpinParams: omega must be finite and > 0");
  }
};

/// Gaps t2 - t1, t3 - t2, t4 - t3 between the four measurement times.
struct LgTimes {
  std::array<double, 3> gaps{};

  explicit LgTimes(std::array<double, 3> g) : gaps(g) {
    for (double x : gaps)
      if (!(x >= 0.0) || !std::isfinite(x))
        throw ValidationError("LgTimes: gaps must be finite and >= 0");
  }
};

/// Maximally mixed spin j under exp(-i omega t J_x), parity measured at both
/// times: C(tau) = (1/(2j+1)) sum_m exp(-2 m^2 Delta^2) cos(2 m omega tau).
inline double corr_spin_parity(double tau, const SpinParams& p) {
  p.validate();
  const int tj = p.two_j();
  double acc = 0.0;
  for (int k = 0; k <= tj; ++k) {
    const double m = 0.5 * (2 * k - tj);
    acc += std::exp(-2.0 * m * m * p.Delta * p.Delta) * std::cos(2.0 * m * p.omega * tau);
  }
  return acc / (tj + 1);
}

/// The same correlator from the Gaussian average of sum_m e^{2 i m theta'} / (2j+1)
/// around theta = omega tau, by adaptive Gauss-Hermite quadrature. The
/// imaginary parts cancel pairwise in m.
inline double corr_spin_parity_quadrature(double tau, const SpinParams& p, double tol = 1e-12) {
  p.validate();
  const int tj = p.two_j();
  auto phase_sum = [tj](double theta) {
    double acc = 0.0;
    for (int k = 0; k <= tj; ++k) acc += std::cos((2 * k - tj) * theta);
    return acc / (tj + 1);
  };
  return coarsen_expectation_adaptive(phase_sum, p.omega * tau, p.Delta, tol);
}

/// Macroscopic-superposition Hamiltonian started in |+j>:
/// C(tau) = exp(-Delta^2 / 2) cos(omega tau). Does not depend on j.
inline double corr_nonclassical(double tau, const SpinParams& p) {
  p.validate();
  return std::exp(-0.5 * p.Delta * p.Delta) * std::cos(p.omega * tau);
}

/// K = C(g1) + C(g2) + C(g3) - C(g1 + g2 + g3).
template <typename C>
double lg_function(const C& correlator, const LgTimes& times) {
  const auto& g = times.gaps;
  return correlator(g[0]) + correlator(g[1]) + correlator(g[2]) - correlator(g[0] + g[1] + g[2]);
}

/// Equal-gap restriction K(tau) = 3 C(tau) - C(3 tau).
template <typename C>
double lg_equal_gap(const C& correlator, double tau) {
  return 3.0 * correlator(tau) - correlator(3.0 * tau);
}

/// Parity (-1)^{j-m} in the J_z basis ordered m = j, j-1, ..., -j.
inline Eigen::MatrixXd parity_operator(double j) {
  SpinParams{j}.validate();
  const int tj = static_cast<int>(std::lround(2.0 * j));
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(tj + 1, tj + 1);
  for (int k = 0; k <= tj; ++k) q(k, k) = (k % 2 == 0) ? 1.0 : -1.0;  // j - m = k
  return q;
}

/// J_x in the same basis.
inline Eigen::MatrixXd spin_jx(double j) {
  SpinParams{j}.validate();
  const int tj = static_cast<int>(std::lround(2.0 * j));
  Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(tj + 1, tj + 1);
  for (int k = 0; k < tj; ++k) {
    const double m = j - k;  // <m-1| J_- |m> = sqrt(j(j+1) - m(m-1))
    const double v = 0.5 * std::sqrt(j * (j + 1.0) - m * (m - 1.0));
    jx(k + 1, k) = v;
    jx(k, k + 1) = v;
  }
  return jx;
}

}  // namespace qcoarse
