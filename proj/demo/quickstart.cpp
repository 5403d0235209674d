// Minimal tour of the library: a few optimized Bell and Leggett-Garg values.

#include "qcoarse/qcoarse.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

int main() {
  using namespace qcoarse;

  const GenericParams sharp{3, 0.0, 0.0};
  std::printf("generic, sharp measurement:      B = %.9f\n",
              maximize_chsh(FuzzyDetectorCorrelator(sharp)).result.value);

  const GenericParams fuzzy{3, 2.0, 0.0};
  std::printf("generic, delta = 2, n = 3:       B = %.9f\n",
              maximize_chsh(FuzzyDetectorCorrelator(fuzzy)).result.value);

  const PhotonCorrelator photon({2, 0.9, 0.3});
  const auto best = maximize_chsh(photon);
  const auto s = best.settings.reduced();
  std::printf("photon n = 2, eta = 0.9, Delta = 0.3: B = %.9f at (%.4f, %.4f, %.4f, %.4f)\n",
              best.result.value, s.theta_a, s.theta_a_prime, s.theta_b, s.theta_b_prime);

  const double amp = ecs_efficiency_amplitude({5.0, 0.05, 0.0});
  std::printf("ECS alpha = 5, eta = 0.05:       B = %.9f\n", maximize_chsh(EcsCorrelator(amp)).result.value);

  const SpinParams spin{1.0, std::sqrt(0.3), 1.0};
  const auto k = maximize_lg([&](double t) { return corr_spin_parity(t, spin); }, 2 * std::numbers::pi);
  std::printf("LG spin j = 1, Delta^2 = 0.3:    K = %.9f\n", k.value);
}
