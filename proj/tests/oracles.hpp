#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical paths.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Maclaurin series of erf in long double; fine for |x| <= 3.
inline double erf_series(double xd) {
  const long double x = xd;
  long double term = x;  // (-1)^k x^{2k+1} / k!
  long double sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= -x * x / k;
    const long double add = term / (2 * k + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L) break;
  }
  return static_cast<double>(2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
}

/// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
/// evaluated bottom-up with a fixed depth; x >= 2.
inline double erf_continued_fraction(double xd) {
  const long double x = xd;
  long double tail = x;
  for (int k = 400; k >= 1; --k) tail = x + (k / 2.0L) / tail;
  const long double erfc = std::exp(-x * x) / std::sqrt(std::numbers::pi_v<long double>) / tail;
  return static_cast<double>(1.0L - erfc);
}

/// Unnormalized Gaussian kernel summed directly over |k| <= k_max, then
/// renormalized.
inline std::vector<double> kernel_weights(double delta, int k_max) {
  std::vector<double> w(static_cast<std::size_t>(2 * k_max + 1));
  double total = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    w[static_cast<std::size_t>(k + k_max)] = std::exp(-(k * k) / (2.0 * delta * delta));
    total += w[static_cast<std::size_t>(k + k_max)];
  }
  for (double& v : w) v /= total;
  return w;
}

inline int chi(int j) { return j > 0 ? 1 : -1; }

inline double f_sum(int n, double theta, double delta, int k_max = 60) {
  const auto w = kernel_weights(delta, k_max);
  double acc = 0.0;
  for (int k = -k_max; k <= k_max; ++k)
    acc += w[static_cast<std::size_t>(k + k_max)] *
           (std::pow(std::cos(theta), 2) * chi(n - k) + std::pow(std::sin(theta), 2) * chi(-n - k));
  return acc;
}

inline double g_sum(int n, double theta, double delta, int k_max = 60) {
  const auto w = kernel_weights(delta, k_max);
  double acc = 0.0;
  for (int k = -k_max; k <= k_max; ++k)
    acc += w[static_cast<std::size_t>(k + k_max)] * (chi(n - k) - chi(-n - k));
  return std::sin(theta) * std::cos(theta) * acc;
}

inline double fuzzy_correlator(double ta, double tb, int n, double delta) {
  return 0.5 * (f_sum(n, ta, delta) * f_sum(-n, tb, delta) + f_sum(-n, ta, delta) * f_sum(n, tb, delta) +
                2.0 * g_sum(n, ta, delta) * g_sum(n, tb, delta));
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(A) by scaling and squaring with a long Taylor series.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Eigen::MatrixXcd x = a / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Single-mode Kraus operators of photon loss, from the binomial formula.
inline std::vector<Eigen::MatrixXcd> loss_kraus(int n_max, double eta) {
  std::vector<Eigen::MatrixXcd> ks;
  for (int l = 0; l <= n_max; ++l) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    for (int m = l; m <= n_max; ++m) {
      double binom = 1.0;
      for (int i = 1; i <= l; ++i) binom = binom * (m - l + i) / i;
      k(m - l, m) = std::sqrt(binom * std::pow(eta, m - l) * std::pow(1.0 - eta, l));
    }
    ks.push_back(k);
  }
  return ks;
}

/// Embeds a single-mode operator on `mode` of `modes` modes, mode 0 leftmost.
inline Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, int mode, int modes) {
  const Eigen::Index levels = op.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int m = 0; m < modes; ++m)
    out = kron(out, m == mode ? op : Eigen::MatrixXcd::Identity(levels, levels).eval());
  return out;
}

/// Generator |n,0><0,n| + h.c. on one party's (H, V) pair, local dim (n+1)^2.
inline Eigen::MatrixXcd swap_generator(int n) {
  const int levels = n + 1;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(levels * levels, levels * levels);
  const int hn = n * levels;  // |n_H, 0_V>
  const int vn = n;           // |0_H, n_V>
  g(hn, vn) = 1.0;
  g(vn, hn) = 1.0;
  return g;
}

/// Local dichotomic observable: +1 for H-only counts and the vacuum, -1 for
/// V-only counts, 0 otherwise.
inline Eigen::MatrixXcd photon_observable(int n) {
  const int levels = n + 1;
  Eigen::MatrixXcd o = Eigen::MatrixXcd::Zero(levels * levels, levels * levels);
  for (int h = 0; h <= n; ++h)
    for (int v = 0; v <= n; ++v) {
      double val = 0.0;
      if (v == 0) val = 1.0;  // H-only, and the vacuum
      else if (h == 0) val = -1.0;
      o(h * levels + v, h * levels + v) = val;
    }
  return o;
}

/// E(theta_a, theta_b) at Delta = 0 in the Heisenberg picture:
/// <psi| U^dag L^dag(O x O) U |psi> with dense matrices throughout.
inline double photon_heisenberg(int n, double eta, double ta, double tb) {
  const int levels = n + 1;
  const Eigen::Index local = levels * levels;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(local * local);
  // (|n,0>_a |0,n>_b + |0,n>_a |n,0>_b) / sqrt(2)
  psi(n * levels * local + n) = 1.0 / std::numbers::sqrt2;
  psi(n * local + n * levels) = 1.0 / std::numbers::sqrt2;

  Eigen::MatrixXcd obs = kron(photon_observable(n), photon_observable(n));
  for (int mode = 0; mode < 4; ++mode) {
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(obs.rows(), obs.cols());
    for (const auto& k : loss_kraus(n, eta)) {
      const Eigen::MatrixXcd big = embed(k, mode, 4);
      next += big.adjoint() * obs * big;
    }
    obs = next;
  }
  const cplx i(0.0, 1.0);
  const Eigen::MatrixXcd ua = expm(i * ta * swap_generator(n));
  const Eigen::MatrixXcd ub = expm(i * tb * swap_generator(n));
  const Eigen::MatrixXcd u = kron(ua, ub);
  return (psi.adjoint() * u.adjoint() * obs * u * psi)(0, 0).real();
}

/// Parity correlator of a maximally mixed spin j by explicit sequential
/// projective measurements: measure Q, evolve by exp(-i theta J_x), measure Q.
inline double spin_parity_sequential(double j, double theta) {
  const int dim = static_cast<int>(std::lround(2 * j)) + 1;
  // basis m = j, j-1, ..., -j; J_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) {
    const double m = j - k;
    jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Eigen::MatrixXcd jx = 0.5 * (jp + jp.adjoint());
  const cplx i(0.0, 1.0);
  const Eigen::MatrixXcd u = expm(-i * theta * jx);
  Eigen::MatrixXcd p_plus = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; k += 2) p_plus(k, k) = 1.0;
  const Eigen::MatrixXcd p_minus = Eigen::MatrixXcd::Identity(dim, dim) - p_plus;
  const Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim);
  double c = 0.0;
  const Eigen::MatrixXcd* proj[2] = {&p_plus, &p_minus};
  for (int s = 0; s < 2; ++s) {
    const Eigen::MatrixXcd post = u * (*proj[s] * rho * *proj[s]) * u.adjoint();
    for (int t = 0; t < 2; ++t) {
      const double prob = (*proj[t] * post).trace().real();
      c += (s == t ? 1.0 : -1.0) * prob;
    }
  }
  return c;
}

}  // namespace oracle
