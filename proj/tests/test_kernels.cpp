#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wavefront/kernels.hpp"

using namespace wavefront;

TEST_CASE("exp_moments against Simpson") {
  for (double x : {-40.0, -3.0, -0.9, -1e-3, 0.0, 1e-3, 0.5, 2.0, 30.0}) {
    const auto m = exp_moments(x);
    for (int n = 0; n < 4; ++n) {
      const double ref = oracle::simpson([&](double u) { return std::pow(u, n) * std::exp(x * u); }, 0, 1, 20000);
      CHECK(m[n] == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("green weights integrate cubics exactly") {
  const double lam = -0.7, mu = 2.3, dt = 0.05;
  const auto w = green_weights(lam, mu, dt);
  auto G = [](double s) { return 1.0 + 2.0 * s - 0.5 * s * s + 0.3 * s * s * s; };
  const int offsets[3][4] = {{0, 1, 2, 3}, {-1, 0, 1, 2}, {-2, -1, 0, 1}};
  for (int st = 0; st < 3; ++st) {
    double left = 0.0, right = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double v = G(offsets[st][k] * dt);
      left += w.left[st][k] * v;
      right += w.right[st][k] * v;
    }
    const double lref = oracle::simpson([&](double s) { return std::exp(lam * (dt - s)) * G(s); }, 0, dt, 2000);
    const double rref = oracle::simpson([&](double s) { return std::exp(-mu * s) * G(s); }, 0, dt, 2000);
    CHECK(left == doctest::Approx(lref).epsilon(1e-12));
    CHECK(right == doctest::Approx(rref).epsilon(1e-12));
  }
  CHECK(w.decay_left == doctest::Approx(std::exp(lam * dt)));
  CHECK(w.decay_right == doctest::Approx(std::exp(-mu * dt)));
}

TEST_CASE("serial and parallel sweeps agree") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const auto w = green_weights(-0.4, 3.1, 0.02);
  for (std::size_t n : {4u, 5u, 37u, 1000u, 100003u}) {
    std::vector<double> G(n);
    for (auto& v : G) v = u(rng);
    std::vector<double> a(n), b(n), c(n - 1);
    green_sweep(G, w, 0.3, 1.7, a, Exec::Serial);
    green_sweep(G, w, 0.3, 1.7, b, Exec::Parallel, 7);
    green_sweep(G, w, 0.3, 1.7, c, Exec::Parallel);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
      if (i + 1 < n) CHECK(c[i] == doctest::Approx(a[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("sweep of a constant reproduces the kernel masses") {
  const double lam = -0.5, mu = 1.5, dt = 0.01;
  const auto w = green_weights(lam, mu, dt);
  const std::size_t n = 4001;
  std::vector<double> G(n, 1.0), out(n);
  green_sweep(G, w, 1.0 / -lam, 1.0 / mu, out, Exec::Serial);
  for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(1.0 / -lam + 1.0 / mu).epsilon(1e-12));
}

TEST_CASE("pde_rhs") {
  const auto g = BirthFunction::nicholson(2.0);
  const std::size_t n = 4097;
  const double dx = 0.1;
  std::vector<double> u(n), ud(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::cos(0.01 * static_cast<double>(i));
    ud[i] = 0.5 + 0.4 * std::sin(0.02 * static_cast<double>(i));
  }
  ud[5] = -0.1;
  pde_rhs(u, ud, dx, g, a, Exec::Serial);
  pde_rhs(u, ud, dx, g, b, Exec::Parallel);
  for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  CHECK(a[0] == doctest::Approx(2 * (u[1] - u[0]) / (dx * dx) - u[0] + g(ud[0])));
  CHECK(a[5] == doctest::Approx((u[4] - 2 * u[5] + u[6]) / (dx * dx) - u[5]));
  CHECK(a[n - 1] == doctest::Approx(2 * (u[n - 2] - u[n - 1]) / (dx * dx) - u[n - 1] + g(ud[n - 1])));
}
