// Serial reference against OpenMP kernels: Green sweep of the profile
// operator and the PDE right-hand side.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "wavefront/birthfn.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/kernels.hpp"

using namespace wavefront;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-12s %10s %12s %12s %9s %11s\n", "kernel", "n", "serial_ms", "omp_ms", "speedup", "max_diff");

  const auto [lambda, mu] = quad_roots(0.25);
  const GreenWeights w = green_weights(lambda, mu, 0.01);
  for (std::size_t n : {10000u, 100000u, 1000000u}) {
    std::vector<double> G(n), s(n), p(n);
    for (std::size_t i = 0; i < n; ++i) G[i] = 1.0 + std::sin(1e-3 * static_cast<double>(i));
    const double ts = best_of(5, [&] { green_sweep(G, w, 1.0, 1.0, s, Exec::Serial); });
    const double tp = best_of(5, [&] { green_sweep(G, w, 1.0, 1.0, p, Exec::Parallel); });
    std::printf("%-12s %10zu %12.3f %12.3f %9.2f %11.2e\n", "green_sweep", n, 1e3 * ts, 1e3 * tp, ts / tp,
                max_diff(s, p));
  }

  const BirthFunction g = BirthFunction::nicholson(2.0);
  for (std::size_t n : {2048u, 16384u, 131072u}) {
    std::vector<double> u(n), d(n), s(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = 0.5 * (1.0 + std::tanh(1e-2 * (static_cast<double>(n) / 2 - static_cast<double>(i))));
      d[i] = 0.9 * u[i];
    }
    const double ts = best_of(5, [&] { pde_rhs(u, d, 0.1, g, s, Exec::Serial); });
    const double tp = best_of(5, [&] { pde_rhs(u, d, 0.1, g, p, Exec::Parallel); });
    std::printf("%-12s %10zu %12.3f %12.3f %9.2f %11.2e\n", "pde_rhs", n, 1e3 * ts, 1e3 * tp, ts / tp,
                max_diff(s, p));
  }
  return 0;
}
