#pragma once

// Entangled photon-number states on four bosonic modes (aH, aV, bH, bV),
// the number-state polarization rotation, photon loss as amplitude damping,
// and the doubly coarsened correlator E_{eta,Delta}.

#include "qcoarse/error.hpp"
#include "qcoarse/kernel_quad.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace qcoarse {

using cplx = std::complex<double>;

enum class Party { A, B };

inline constexpr int kPhotonModes = 4;     // aH, aV, bH, bV
inline constexpr int kMaxPhotonNumber = 4;  // (n + 1)^4 <= 625

/// Truncated multimode Fock space: modes with occupations 0..n_max each,
/// mode 0 most significant in the flat index.
class FockSpace {
 public:
  FockSpace(int n_max, int modes) : n_max_(n_max), modes_(modes) {
    if (n_max < 0 || modes < 1) throw ValidationError("FockSpace: bad cutoff or mode count");
    dim_ = 1;
    for (int m = 0; m < modes; ++m) dim_ *= n_max + 1;
  }

  int n_max() const { return n_max_; }
  int modes() const { return modes_; }
  Eigen::Index dim() const { return dim_; }
  int levels() const { return n_max_ + 1; }

  Eigen::Index stride(int mode) const {
    Eigen::Index s = 1;
    for (int m = modes_ - 1; m > mode; --m) s *= levels();
    return s;
  }

  int occupation(Eigen::Index index, int mode) const {
    return static_cast<int>((index / stride(mode)) % levels());
  }

  Eigen::Index index(std::span<const int> occ) const {
    if (static_cast<int>(occ.size()) != modes_)
      throw ValidationError("FockSpace::index: expected " + std::to_string(modes_) + " occupations");
    Eigen::Index idx = 0;
    for (int m = 0; m < modes_; ++m) {
      if (occ[static_cast<std::size_t>(m)] < 0 || occ[static_cast<std::size_t>(m)] > n_max_)
        throw ValidationError("FockSpace::index: occupation out of range");
      idx = idx * levels() + occ[static_cast<std::size_t>(m)];
    }
    return idx;
  }

 private:
  int n_max_;
  int modes_;
  Eigen::Index dim_;
};

class FockDensityMatrix {
 public:
  FockDensityMatrix(int n_max, int modes, Eigen::MatrixXcd entries)
      : space_(n_max, modes), rho_(std::move(entries)) {
    if (rho_.rows() != space_.dim() || rho_.cols() != space_.dim())
      throw ValidationError("FockDensityMatrix: entries are " + std::to_string(rho_.rows()) + "x" +
                            std::to_string(rho_.cols()) + ", expected dimension " +
                            std::to_string(space_.dim()));
  }

  static FockDensityMatrix pure(int n_max, int modes, const Eigen::VectorXcd& psi) {
    return {n_max, modes, psi * psi.adjoint()};
  }

  const FockSpace& space() const { return space_; }
  int n_max() const { return space_.n_max(); }
  int modes() const { return space_.modes(); }
  Eigen::Index dim() const { return space_.dim(); }
  const Eigen::MatrixXcd& entries() const { return rho_; }

  cplx trace() const { return rho_.trace(); }
  double purity() const { return (rho_ * rho_).trace().real(); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  Eigen::VectorXd populations() const { return rho_.diagonal().real(); }

 private:
  FockSpace space_;
  Eigen::MatrixXcd rho_;
};

/// (|n_H>_a |n_V>_b + |n_V>_a |n_H>_b) / sqrt(2) with cutoff n per mode.
inline Eigen::VectorXcd psi_n_vector(int n) {
  if (n < 1 || n > kMaxPhotonNumber)
    throw ValidationError("build_psi_n: n must lie in [1, " + std::to_string(kMaxPhotonNumber) +
                          "], got " + std::to_string(n));
  const FockSpace space(n, kPhotonModes);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
  const std::array<int, 4> hv{n, 0, 0, n};
  const std::array<int, 4> vh{0, n, n, 0};
  psi(space.index(hv)) = 1.0 / std::numbers::sqrt2;
  psi(space.index(vh)) = 1.0 / std::numbers::sqrt2;
  return psi;
}

inline FockDensityMatrix build_psi_n(int n) {
  return FockDensityMatrix::pure(n, kPhotonModes, psi_n_vector(n));
}

namespace detail {

// exp[i theta (|n,0><0,n| + h.c.)] restricted to span{|n,0>, |0,n>}.
inline std::array<cplx, 4> polarization_block(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {cplx(c, 0.0), cplx(0.0, s), cplx(0.0, s), cplx(c, 0.0)};  // row-major
}

// Local (H, V) index of one party: kH * levels + kV.
inline std::array<Eigen::Index, 2> rotated_pair(int n, int levels) {
  return {static_cast<Eigen::Index>(n) * levels, static_cast<Eigen::Index>(n)};
}

inline void check_photon_layout(const FockSpace& space, int n) {
  if (space.modes() != kPhotonModes)
    throw ValidationError("photon operations need " + std::to_string(kPhotonModes) +
                          " modes, got " + std::to_string(space.modes()));
  if (n < 1 || n > space.n_max())
    throw ValidationError("rotation photon number " + std::to_string(n) +
                          " is incompatible with cutoff " + std::to_string(space.n_max()));
}

// Full index from the two parties' local indices.
inline Eigen::Index join(Party party, Eigen::Index local, Eigen::Index other, Eigen::Index local_dim) {
  return party == Party::A ? local * local_dim + other : other * local_dim + local;
}

// Binomial thinning amplitudes sqrt(C(m,l)) eta^{(m-l)/2} (1-eta)^{l/2}.
inline std::vector<std::vector<double>> damping_amplitudes(int n_max, double eta) {
  std::vector<std::vector<double>> amp(static_cast<std::size_t>(n_max) + 1);
  for (int m = 0; m <= n_max; ++m) {
    amp[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(m) + 1);
    double binom = 1.0;
    for (int l = 0; l <= m; ++l) {
      if (l > 0) binom = binom * (m - l + 1) / l;
      amp[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)] =
          std::sqrt(binom) * std::pow(eta, 0.5 * (m - l)) * std::pow(1.0 - eta, 0.5 * l);
    }
  }
  return amp;
}

inline void check_efficiency(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw ValidationError("detector efficiency eta must lie in [0, 1], got " + std::to_string(eta));
}

}  // namespace detail

/// U_p(theta) rho U_p(theta)^dagger on one party's (H, V) mode pair.
inline FockDensityMatrix rotate_polarization(const FockDensityMatrix& rho, Party party,
                                             double theta, int n) {
  const auto& space = rho.space();
  detail::check_photon_layout(space, n);
  const Eigen::Index local_dim = static_cast<Eigen::Index>(space.levels()) * space.levels();
  const auto [p, q] = detail::rotated_pair(n, space.levels());
  const auto u = detail::polarization_block(theta);

  Eigen::MatrixXcd m = rho.entries();
  for (Eigen::Index other = 0; other < local_dim; ++other) {
    const Eigen::Index rp = detail::join(party, p, other, local_dim);
    const Eigen::Index rq = detail::join(party, q, other, local_dim);
    const Eigen::RowVectorXcd row_p = m.row(rp);
    const Eigen::RowVectorXcd row_q = m.row(rq);
    m.row(rp) = u[0] * row_p + u[1] * row_q;
    m.row(rq) = u[2] * row_p + u[3] * row_q;
  }
  for (Eigen::Index other = 0; other < local_dim; ++other) {
    const Eigen::Index cp = detail::join(party, p, other, local_dim);
    const Eigen::Index cq = detail::join(party, q, other, local_dim);
    const Eigen::VectorXcd col_p = m.col(cp);
    const Eigen::VectorXcd col_q = m.col(cq);
    m.col(cp) = col_p * std::conj(u[0]) + col_q * std::conj(u[1]);
    m.col(cq) = col_p * std::conj(u[2]) + col_q * std::conj(u[3]);
  }
  return {space.n_max(), space.modes(), std::move(m)};
}

/// Beam splitter of transmission eta followed by tracing out the vacuum port,
/// in Kraus form: K_l = sum_m sqrt(C(m,l)) eta^{(m-l)/2} (1-eta)^{l/2} |m-l><m|.
inline FockDensityMatrix loss_channel(const FockDensityMatrix& rho, int mode, double eta) {
  detail::check_efficiency(eta);
  const auto& space = rho.space();
  if (mode < 0 || mode >= space.modes())
    throw ValidationError("loss_channel: mode index " + std::to_string(mode) + " out of range");
  if (eta == 1.0) return rho;

  const auto amp = detail::damping_amplitudes(space.n_max(), eta);
  const Eigen::Index stride = space.stride(mode);
  const auto& in = rho.entries();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (Eigen::Index j = 0; j < space.dim(); ++j) {
    const int mj = space.occupation(j, mode);
    for (Eigen::Index i = 0; i < space.dim(); ++i) {
      const cplx v = in(i, j);
      if (v == cplx(0.0, 0.0)) continue;
      const int mi = space.occupation(i, mode);
      const int lmax = std::min(mi, mj);
      for (int l = 0; l <= lmax; ++l) {
        out(i - l * stride, j - l * stride) +=
            amp[static_cast<std::size_t>(mi)][static_cast<std::size_t>(l)] *
            amp[static_cast<std::size_t>(mj)][static_cast<std::size_t>(l)] * v;
      }
    }
  }
  return {space.n_max(), space.modes(), std::move(out)};
}

/// Dichotomic photon-counting observable of one party, diagonal in the local
/// (kH, kV) basis: +1 for H-only clicks and for the vacuum, -1 for V-only
/// clicks, 0 when both modes are occupied.
struct ModeObservable {
  int n_max = 0;
  std::vector<double> diagonal;  // index kH * (n_max + 1) + kV

  double operator()(int k_h, int k_v) const {
    return diagonal[static_cast<std::size_t>(k_h * (n_max + 1) + k_v)];
  }
};

inline ModeObservable photon_observable(int n_max) {
  ModeObservable obs;
  obs.n_max = n_max;
  const int levels = n_max + 1;
  obs.diagonal.assign(static_cast<std::size_t>(levels * levels), 0.0);
  for (int kh = 0; kh <= n_max; ++kh) {
    for (int kv = 0; kv <= n_max; ++kv) {
      double v = 0.0;
      if (kv == 0)
        v = 1.0;  // includes the vacuum
      else if (kh == 0)
        v = -1.0;
      obs.diagonal[static_cast<std::size_t>(kh * levels + kv)] = v;
    }
  }
  return obs;
}

/// Tr[rho (O_a x O_b)] for observables diagonal in the Fock basis.
inline double diagonal_expectation(const Eigen::VectorXd& populations, const FockSpace& space,
                                   const ModeObservable& obs_a, const ModeObservable& obs_b) {
  const Eigen::Index local_dim = static_cast<Eigen::Index>(space.levels()) * space.levels();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < space.dim(); ++i) {
    const double p = populations(i);
    if (p == 0.0) continue;
    acc += p * obs_a.diagonal[static_cast<std::size_t>(i / local_dim)] *
           obs_b.diagonal[static_cast<std::size_t>(i % local_dim)];
  }
  return acc;
}

inline double diagonal_expectation(const FockDensityMatrix& rho, const ModeObservable& obs_a,
                                   const ModeObservable& obs_b) {
  return diagonal_expectation(rho.populations(), rho.space(), obs_a, obs_b);
}

struct PhotonParams {
  int n = 1;          // photons per branch
  double eta = 1.0;   // detector efficiency
  double Delta = 0.0; // reference std, radians

  void validate() const {
    if (n < 1 || n > kMaxPhotonNumber)
      throw ValidationError("PhotonParams: n must lie in [1, " + std::to_string(kMaxPhotonNumber) +
                            "], got " + std::to_string(n));
    detail::check_efficiency(eta);
    if (!(Delta >= 0.0) || !std::isfinite(Delta))
      throw ValidationError("PhotonParams: Delta must be finite and >= 0");
  }
};

inline constexpr int kPhotonQuadratureOrder = 20;

/// Reference implementation of E_{eta,Delta}: for every pair of quadrature
/// nodes, rotate the full density matrix, damp all four modes and take the
/// diagonal expectation. Quadratic in the number of nodes; for tests.
inline double corr_photon_dense(double theta_a, double theta_b, const PhotonParams& p,
                                int order = kPhotonQuadratureOrder) {
  p.validate();
  const auto rho0 = build_psi_n(p.n);
  const auto obs = photon_observable(p.n);
  auto evaluate = [&](double ta, double tb) {
    auto rho = rotate_polarization(rotate_polarization(rho0, Party::A, ta, p.n), Party::B, tb, p.n);
    for (int mode = 0; mode < kPhotonModes; ++mode) rho = loss_channel(rho, mode, p.eta);
    return diagonal_expectation(rho, obs, obs);
  };
  if (p.Delta == 0.0) return evaluate(theta_a, theta_b);
  const auto& rule = cached_gauss_hermite(order);
  const double scale = std::numbers::sqrt2 * p.Delta;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      row += rule.weights[j] *
             evaluate(theta_a + scale * rule.nodes[i], theta_b + scale * rule.nodes[j]);
    acc += rule.weights[i] * row;
  }
  return acc;
}

/// E_{eta,Delta}(theta_a, theta_b) in the Schroedinger picture.
///
/// Rotations with the same generator compose additively, so the Gaussian
/// average over reference offsets is folded once into a coarsened state
///   rho_bar = sum_ij w_i w_j U_a(x_i) U_b(y_j) rho U^dagger,
/// and each evaluation rotates rho_bar by the nominal settings, damps the
/// populations and takes the diagonal expectation. The observable is diagonal
/// and damping maps populations to populations, so only the diagonal of the
/// rotated state is formed.
class PhotonCorrelator {
 public:
  explicit PhotonCorrelator(const PhotonParams& p, int order = kPhotonQuadratureOrder)
      : params_(p), space_(p.n, kPhotonModes), obs_(photon_observable(p.n)) {
    p.validate();
    local_dim_ = static_cast<Eigen::Index>(space_.levels()) * space_.levels();
    pair_ = detail::rotated_pair(p.n, space_.levels());
    thinning_ = detail::damping_amplitudes(p.n, p.eta);
    for (auto& row : thinning_)
      for (double& a : row) a *= a;

    const Eigen::VectorXcd psi = psi_n_vector(p.n);
    if (p.Delta == 0.0) {
      rho_bar_ = psi * psi.adjoint();
      return;
    }
    rho_bar_ = Eigen::MatrixXcd::Zero(space_.dim(), space_.dim());
    const auto& rule = cached_gauss_hermite(order);
    const double scale = std::numbers::sqrt2 * p.Delta;
    std::vector<Eigen::Index> support;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const Eigen::VectorXcd v =
            rotate_vector(psi, scale * rule.nodes[i], scale * rule.nodes[j]);
        support.clear();
        for (Eigen::Index k = 0; k < v.size(); ++k)
          if (v(k) != cplx(0.0, 0.0)) support.push_back(k);
        const double w = rule.weights[i] * rule.weights[j];
        for (Eigen::Index r : support)
          for (Eigen::Index c : support) rho_bar_(r, c) += w * v(r) * std::conj(v(c));
      }
    }
  }

  const PhotonParams& params() const { return params_; }
  const Eigen::MatrixXcd& coarsened_state() const { return rho_bar_; }

  /// Photon-number populations reaching the detectors at the given settings.
  Eigen::VectorXd detected_populations(double theta_a, double theta_b) const {
    Eigen::VectorXd pops = rotated_diagonal(theta_a, theta_b);
    if (params_.eta == 1.0) return pops;
    for (int mode = 0; mode < kPhotonModes; ++mode) pops = damp_populations(pops, mode);
    return pops;
  }

  double operator()(double theta_a, double theta_b) const {
    return diagonal_expectation(detected_populations(theta_a, theta_b), space_, obs_, obs_);
  }

 private:
  // Nonzero entries of one row of a party's local rotation.
  struct RowTerm {
    Eigen::Index col;
    cplx coeff;
  };

  int local_row(Eigen::Index local, const std::array<cplx, 4>& u, std::array<RowTerm, 2>& out) const {
    if (local == pair_[0]) {
      out[0] = {pair_[0], u[0]};
      out[1] = {pair_[1], u[1]};
      return 2;
    }
    if (local == pair_[1]) {
      out[0] = {pair_[0], u[2]};
      out[1] = {pair_[1], u[3]};
      return 2;
    }
    out[0] = {local, cplx(1.0, 0.0)};
    return 1;
  }

  Eigen::VectorXcd rotate_vector(const Eigen::VectorXcd& psi, double ta, double tb) const {
    const auto ua = detail::polarization_block(ta);
    const auto ub = detail::polarization_block(tb);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    std::array<RowTerm, 2> ra{};
    std::array<RowTerm, 2> rb{};
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const int na = local_row(i / local_dim_, ua, ra);
      const int nb = local_row(i % local_dim_, ub, rb);
      cplx acc(0.0, 0.0);
      for (int x = 0; x < na; ++x)
        for (int y = 0; y < nb; ++y)
          acc += ra[static_cast<std::size_t>(x)].coeff * rb[static_cast<std::size_t>(y)].coeff *
                 psi(ra[static_cast<std::size_t>(x)].col * local_dim_ + rb[static_cast<std::size_t>(y)].col);
      out(i) = acc;
    }
    return out;
  }

  // diag(U rho_bar U^dagger) with U = U_a(theta_a) x U_b(theta_b).
  Eigen::VectorXd rotated_diagonal(double theta_a, double theta_b) const {
    const auto ua = detail::polarization_block(theta_a);
    const auto ub = detail::polarization_block(theta_b);
    Eigen::VectorXd diag(space_.dim());
    std::array<RowTerm, 2> ra{};
    std::array<RowTerm, 2> rb{};
    std::array<RowTerm, 4> row{};
    for (Eigen::Index i = 0; i < space_.dim(); ++i) {
      const int na = local_row(i / local_dim_, ua, ra);
      const int nb = local_row(i % local_dim_, ub, rb);
      int count = 0;
      for (int x = 0; x < na; ++x)
        for (int y = 0; y < nb; ++y)
          row[static_cast<std::size_t>(count++)] = {
              ra[static_cast<std::size_t>(x)].col * local_dim_ + rb[static_cast<std::size_t>(y)].col,
              ra[static_cast<std::size_t>(x)].coeff * rb[static_cast<std::size_t>(y)].coeff};
      cplx acc(0.0, 0.0);
      for (int k = 0; k < count; ++k) {
        const auto& rk = row[static_cast<std::size_t>(k)];
        for (int l = 0; l < count; ++l) {
          const auto& rl = row[static_cast<std::size_t>(l)];
          acc += rk.coeff * rho_bar_(rk.col, rl.col) * std::conj(rl.coeff);
        }
      }
      diag(i) = acc.real();
    }
    return diag;
  }

  Eigen::VectorXd damp_populations(const Eigen::VectorXd& pops, int mode) const {
    const Eigen::Index stride = space_.stride(mode);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pops.size());
    for (Eigen::Index i = 0; i < pops.size(); ++i) {
      const double pi = pops(i);
      if (pi == 0.0) continue;
      const int m = space_.occupation(i, mode);
      const auto& t = thinning_[static_cast<std::size_t>(m)];
      for (int l = 0; l <= m; ++l) out(i - l * stride) += t[static_cast<std::size_t>(l)] * pi;
    }
    return out;
  }

  PhotonParams params_;
  FockSpace space_;
  ModeObservable obs_;
  Eigen::Index local_dim_ = 0;
  std::array<Eigen::Index, 2> pair_{};
  std::vector<std::vector<double>> thinning_;  // C(m,l) eta^{m-l} (1-eta)^l
  Eigen::MatrixXcd rho_bar_;
};

inline double corr_photon(double theta_a, double theta_b, const PhotonParams& p,
                          int order = kPhotonQuadratureOrder) {
  return PhotonCorrelator(p, order)(theta_a, theta_b);
}

}  // namespace qcoarse
