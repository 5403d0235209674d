#pragma once

// Deterministic derivative-free maximization: a lattice of starting points
// over one period per coordinate, each refined by Nelder-Mead.

#include "qcoarse/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace qcoarse {

struct OptimizationOptions {
  int starts = 0;                // 0 -> 3^d
  double xtol = 1e-8;            // simplex diameter, sup norm
  double ftol = 1e-10;           // spread of vertex values
  long max_evaluations = 20000;  // per start, restarts included
  int max_restarts = 4;
};

struct OptimizationResult {
  double value = 0.0;
  std::vector<double> argmax;
  long evaluations = 0;
  bool converged = false;
  int starts_used = 0;
};

/// Representative of x in [0, period).
inline double reduce_period(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

/// Largest m with m^d <= starts (at least 1).
inline int lattice_points_per_axis(int starts, int d) {
  int m = 1;
  while (true) {
    std::int64_t next = 1;
    for (int i = 0; i < d; ++i) next *= (m + 1);
    if (next > starts) break;
    ++m;
  }
  return m;
}

namespace detail {

struct SimplexRun {
  std::vector<double> x;
  double value = 0.0;  // of the maximized objective
  long evaluations = 0;
  bool converged = false;
};

// Nelder-Mead on -f from x0 with an axis-aligned initial simplex of size `step`.
template <typename F>
SimplexRun nelder_mead(F& f, std::vector<double> x0, double step, const OptimizationOptions& opt,
                       long budget) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> pts(d + 1, x0);
  std::vector<double> val(d + 1);
  long evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return -static_cast<double>(f(x));
  };
  for (std::size_t i = 1; i <= d; ++i) pts[i][i - 1] += step;
  for (std::size_t i = 0; i <= d; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), xr(d), xe(d), xc(d);
  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    {
      std::vector<std::vector<double>> p2(d + 1);
      std::vector<double> v2(d + 1);
      for (std::size_t i = 0; i <= d; ++i) {
        p2[i] = pts[order[i]];
        v2[i] = val[order[i]];
      }
      pts.swap(p2);
      val.swap(v2);
    }

    double xspread = 0.0;
    double fspread = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      fspread = std::max(fspread, std::fabs(val[i] - val[0]));
      for (std::size_t k = 0; k < d; ++k) xspread = std::max(xspread, std::fabs(pts[i][k] - pts[0][k]));
    }
    if (xspread <= opt.xtol && fspread <= opt.ftol) {
      converged = true;
      break;
    }
    if (evals >= budget) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k] / static_cast<double>(d);

    const auto& worst = pts[d];
    for (std::size_t k = 0; k < d; ++k) xr[k] = centroid[k] + (centroid[k] - worst[k]);
    const double fr = eval(xr);
    if (fr < val[0]) {
      for (std::size_t k = 0; k < d; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - worst[k]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[d] = xe;
        val[d] = fe;
      } else {
        pts[d] = xr;
        val[d] = fr;
      }
      continue;
    }
    if (fr < val[d - 1]) {
      pts[d] = xr;
      val[d] = fr;
      continue;
    }
    const bool outside = fr < val[d];
    for (std::size_t k = 0; k < d; ++k)
      xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k])
                      : centroid[k] + 0.5 * (worst[k] - centroid[k]);
    const double fc = eval(xc);
    if (fc < (outside ? fr : val[d])) {
      pts[d] = xc;
      val[d] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t k = 0; k < d; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
      val[i] = eval(pts[i]);
    }
  }
  return {pts[0], -val[0], evals, converged};
}

// Nelder-Mead, restarted from its own optimum with a smaller simplex until a
// restart no longer improves the value by more than ftol.
template <typename F>
SimplexRun refine(F& f, const std::vector<double>& x0, double step, const OptimizationOptions& opt) {
  SimplexRun best = nelder_mead(f, x0, step, opt, opt.max_evaluations);
  long used = best.evaluations;
  for (int r = 0; r < opt.max_restarts && best.converged; ++r) {
    step = std::max(0.1 * step, 100.0 * opt.xtol);
    auto next = nelder_mead(f, best.x, step, opt, opt.max_evaluations - used);
    used += next.evaluations;
    const bool improved = next.value > best.value + opt.ftol;
    if (next.value > best.value) {
      next.evaluations = used;
      best = std::move(next);
    }
    if (!improved) break;
  }
  best.evaluations = used;
  return best;
}

}  // namespace detail

/// Maximizes `objective` (callable on const std::vector<double>&) over R^d.
/// Starts sit on an m^d lattice at cell centers of [0, period)^d with the
/// largest m such that m^d <= starts. The returned argmax is reduced into
/// [0, period) and `value` is the objective evaluated there. Ties between
/// starts go to the lexicographically smallest argmax.
template <typename F>
OptimizationResult maximize(F&& objective, int d, double period, int starts,
                            OptimizationOptions opt = {}) {
  if (d < 1 || d > 4) throw ValidationError("maximize: dimension must lie in [1, 4], got " + std::to_string(d));
  if (!(period > 0.0)) throw ValidationError("maximize: period must be > 0");
  if (starts <= 0) {
    starts = 1;
    for (int i = 0; i < d; ++i) starts *= 3;
  }
  opt.starts = starts;
  const int m = lattice_points_per_axis(starts, d);
  int total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  const double step = period / (2.0 * m);

  OptimizationResult out;
  out.starts_used = total;
  bool have = false;
  std::vector<double> x0(static_cast<std::size_t>(d));
  for (int s = 0; s < total; ++s) {
    int rem = s;
    for (int k = d - 1; k >= 0; --k) {
      x0[static_cast<std::size_t>(k)] = period * ((rem % m) + 0.5) / m;
      rem /= m;
    }
    auto run = detail::refine(objective, x0, step, opt);
    out.evaluations += run.evaluations;
    for (double& x : run.x) x = reduce_period(x, period);
    const double value = static_cast<double>(objective(run.x));
    ++out.evaluations;
    const bool better = !have || value > out.value ||
                        (value == out.value && std::lexicographical_compare(
                                                   run.x.begin(), run.x.end(),
                                                   out.argmax.begin(), out.argmax.end()));
    if (better) {
      out.value = value;
      out.argmax = run.x;
      out.converged = run.converged;
      have = true;
    }
  }
  return out;
}

struct ChshSettings {
  double theta_a = 0.0;
  double theta_a_prime = 0.0;
  double theta_b = 0.0;
  double theta_b_prime = 0.0;

  /// Every angle reduced modulo pi.
  ChshSettings reduced() const {
    const double pi = std::numbers::pi;
    return {reduce_period(theta_a, pi), reduce_period(theta_a_prime, pi),
            reduce_period(theta_b, pi), reduce_period(theta_b_prime, pi)};
  }
};

/// B = E(a, b) + E(a', b) + E(a, b') - E(a', b').
template <typename E>
double chsh_value(const E& correlator, const ChshSettings& s) {
  return correlator(s.theta_a, s.theta_b) + correlator(s.theta_a_prime, s.theta_b) +
         correlator(s.theta_a, s.theta_b_prime) - correlator(s.theta_a_prime, s.theta_b_prime);
}

struct ChshOptimum {
  OptimizationResult result;
  ChshSettings settings;
};

/// Maximizes B over the four angles; every correlator here has period pi in
/// each angle.
template <typename E>
ChshOptimum maximize_chsh(const E& correlator, int starts = 0, const OptimizationOptions& opt = {}) {
  auto objective = [&](const std::vector<double>& x) {
    return chsh_value(correlator, ChshSettings{x[0], x[1], x[2], x[3]});
  };
  ChshOptimum out;
  out.result = maximize(objective, 4, std::numbers::pi, starts, opt);
  const auto& x = out.result.argmax;
  out.settings = {x[0], x[1], x[2], x[3]};
  return out;
}

/// Maximizes K over the three (non-negative) gaps. `period` is a period of
/// the correlator in tau.
template <typename C>
OptimizationResult maximize_lg(const C& correlator, double period, int starts = 0,
                               const OptimizationOptions& opt = {}) {
  auto objective = [&](const std::vector<double>& g) {
    return correlator(g[0]) + correlator(g[1]) + correlator(g[2]) - correlator(g[0] + g[1] + g[2]);
  };
  return maximize(objective, 3, period, starts, opt);
}

/// Maximizes the equal-gap restriction 3 C(tau) - C(3 tau).
template <typename C>
OptimizationResult maximize_lg_equal_gap(const C& correlator, double period, int starts = 0,
                                         const OptimizationOptions& opt = {}) {
  auto objective = [&](const std::vector<double>& g) {
    return 3.0 * correlator(g[0]) - correlator(3.0 * g[0]);
  };
  return maximize(objective, 1, period, starts, opt);
}

}  // namespace qcoarse
