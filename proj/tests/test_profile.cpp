#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/error.hpp"
#include "wavefront/profile.hpp"

using namespace wavefront;

namespace {

MeshFunction sample(double t0, double t1, double dt, auto&& f) {
  MeshFunction x;
  x.t0 = t0;
  x.dt = dt;
  const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt)) + 1;
  x.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) x.values[i] = f(x.t(i));
  return x;
}

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

const auto nich2 = BirthFunction::nicholson(2.0);
const auto nich_e2 = BirthFunction::nicholson(std::exp(2.0));

const WaveProfile& p2_profile() {
  static const WaveProfile w = solve_profile(nich2, 1.0, 2.0 * minimal_speed(2.0, 1.0).c_star);
  return w;
}

}  // namespace

TEST_CASE("apply_A of the constant kappa is kappa") {
  const double kappa = 2.0;
  for (double h : {0.0, 0.5, 2.0}) {
    auto x = sample(-20, 30, 0.05, [&](double) { return kappa; });
    x.left = {kappa, 0.0, 0.0};
    x.right = {kappa, 0.0, 0.0};
    const auto y = apply_A(x, nich_e2, h, 0.3);
    for (double v : y) CHECK(std::abs(v - kappa) < 1e-10);
  }
}

TEST_CASE("apply_A of zero is zero") {
  auto x = sample(-5, 5, 0.1, [](double) { return 0.0; });
  for (double v : apply_A(x, nich2, 1.0, 0.5)) CHECK(v == 0.0);
}

TEST_CASE("L phi+ = phi+") {
  for (double a : {1.5, 3.0, 8.0}) {
    for (double h : {0.5, 1.0, 2.0}) {
      const double eps = 0.6 * minimal_speed(a, h).epsilon0;
      const auto pair = real_root_pair({a, h, eps});
      REQUIRE(pair.has_value());
      const double l1 = pair->lambda1;
      // Cubic quadrature error scales like (lambda1 dt)^4.
      const double dt = h / std::ceil(h * std::max(l1, 1.0) / 0.02);
      auto x = sample(-40, 0, dt, [&](double t) { return std::exp(l1 * t); });
      x.left = {0.0, x.values.front(), l1};
      x.right = {0.0, x.values.back(), l1};
      const auto y = apply_L(x, a, h, eps);
      CHECK(sup_gap(y, x.values) < 1e-8);
    }
  }
}

TEST_CASE("apply_A matches direct quadrature") {
  const double h = 0.8, eps = 0.2, dt = 0.04;
  const auto [lam, mu] = quad_roots(eps);
  auto f = [](double t) { return 1.0 + std::tanh(0.7 * t) + 0.2 * std::exp(-t * t); };
  auto x = sample(-30, 30, dt, f);
  x.left = {0.0, x.values.front(), 1.4};
  x.right = {2.0, x.values.back() - 2.0, -1.4};
  const auto y = apply_A(x, nich_e2, h, eps);
  for (double ti : {-10.0, -1.0, 0.0, 2.52, 12.0}) {
    auto G = [&](double s) { return nich_e2(std::max(x(s - h), 0.0)); };
    const double left = oracle::simpson([&](double s) { return std::exp(lam * (ti - s)) * G(s); }, ti - 200, ti, 400000);
    const double right = oracle::simpson([&](double s) { return std::exp(mu * (ti - s)) * G(s); }, ti, ti + 60, 400000);
    const double ref = (left + right) / (eps * (mu - lam));
    const auto i = static_cast<std::size_t>(std::llround((ti - x.t0) / dt));
    CHECK(y[i] == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("apply_A rejects misaligned delays") {
  auto x = sample(-5, 5, 0.1, [](double) { return 0.1; });
  CHECK_THROWS_AS(apply_A(x, nich2, 0.15, 0.5), Error);
}

TEST_CASE("cone bounds") {
  const ConeBounds cb{0.1, 0.4, 1.3};
  for (double t = -30; t <= 10; t += 0.01) {
    CHECK(cb.lower(t) >= 0.0);
    CHECK(cb.lower(t) <= cb.upper(t));
    if (t >= 0) CHECK(cb.lower(t) == 0.0);
  }
}

TEST_CASE("the cap maps the cone into itself") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> up(1.5, 6.0), uh(0.2, 2.5), frac(0.2, 0.95), phase(0.0, 6.28);
  for (int k = 0; k < 10; ++k) {
    const double p = up(rng), h = uh(rng), delta = 0.1;
    const auto g = BirthFunction::piecewise_linear_cap(p, delta);
    const double eps = frac(rng) * minimal_speed(p, h).epsilon0;
    const auto pair = real_root_pair({p, h, eps});
    REQUIRE(pair.has_value());
    const ConeBounds cb{delta, pair->lambda1, pair->lambda2};
    const double ph = phase(rng);
    const double dt = h / std::ceil(h / 0.01);
    auto theta = [&](double t) { return 0.5 + 0.4 * std::sin(0.3 * t + ph); };
    auto x = sample(-std::min(40.0 / cb.lambda1, 300.0), 20.0, dt,
                    [&](double t) { return cb.lower(t) + theta(t) * (cb.upper(t) - cb.lower(t)); });
    x.left = {0.0, x.values.front(), cb.lambda1};
    x.right = {x.values.back(), 0.0, 0.0};
    const auto y = apply_A(x, g, h, eps);
    for (std::size_t i = 0; i < y.size() && x.t(i) <= 0.0; ++i) {
      CHECK(y[i] >= cb.lower(x.t(i)) - 1e-8);
      CHECK(y[i] <= cb.upper(x.t(i)) + 1e-8);
    }
  }
}

TEST_CASE("profile for Nicholson p = 2") {
  const WaveProfile& w = p2_profile();
  REQUIRE(w.converged);
  CHECK(w.residual_sup < 1e-6);
  const auto inv = profile_invariants(w, nich2);
  CHECK(inv.nonnegative);
  CHECK(inv.bounded);
  CHECK(inv.permanent);
  CHECK(inv.slope_ok);
  CHECK(inv.max_value <= w.kappa + 1e-8);
  for (std::size_t i = 1; i < w.x.size(); ++i) CHECK(w.x.values[i] >= w.x.values[i - 1] - 1e-9);
  CHECK(w.x(0.0) == doctest::Approx(0.5 * w.kappa).epsilon(1e-9));
  CHECK(w.x.values.front() < w.delta / 100);

  const std::size_t n = w.x.size();
  double mean = 0.0;
  for (std::size_t i = n - n / 10; i < n; ++i) mean += w.x.values[i];
  mean /= static_cast<double>(n / 10);
  CHECK(std::abs(mean - w.kappa) < 1e-3 * w.kappa);

  const auto fit = check_asymptotics(w);
  CHECK(fit.passed);
  CHECK(fit.target_index == 1);
  CHECK(fit.fitted_rate == doctest::Approx(w.lambda1).epsilon(1e-2));

  const auto tail = classify_tail(w, nich2, 1.0);
  CHECK(tail.observed == TailClass::MonotoneApproach);
  CHECK(tail.consistent);
}

TEST_CASE("serial and parallel solves agree") {
  const double c = 2.0 * minimal_speed(2.0, 1.0).c_star;
  SolverConfig par;
  par.exec = Exec::Parallel;
  const auto a = p2_profile();
  const auto b = solve_profile(nich2, 1.0, c, par);
  REQUIRE(a.x.size() == b.x.size());
  CHECK(sup_gap(a.x.values, b.x.values) < 1e-9);
}

TEST_CASE("profile for Nicholson p = e^2 with a short delay") {
  const double c = 2.0 * minimal_speed(std::exp(2.0), 0.1).c_star;
  const auto w = solve_profile(nich_e2, 0.1, c);
  CHECK(w.converged);
  CHECK(w.residual_sup < 1e-6);
  const auto inv = profile_invariants(w, nich_e2);
  CHECK(inv.nonnegative);
  CHECK(inv.bounded);
  CHECK(inv.permanent);
  CHECK(w.x.values.back() == doctest::Approx(w.kappa).epsilon(1e-3));
}

TEST_CASE("speeds at or below c_star are rejected") {
  const double cs = minimal_speed(2.0, 1.0).c_star;
  CHECK_THROWS_AS(solve_profile(nich2, 1.0, 0.9 * cs), Error);
  try {
    solve_profile(nich2, 1.0, cs);
    FAIL("expected SpeedBelowMinimal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpeedBelowMinimal);
  }
}

TEST_CASE("synthetic tail fits") {
  std::vector<double> t, x1, x2;
  for (int i = 0; i <= 4000; ++i) {
    const double s = -100.0 + 0.05 * i;
    t.push_back(s);
    x1.push_back(std::exp(0.5 * s));
    x2.push_back(std::exp(0.5 * s) + std::exp(0.9 * s));
  }
  const auto r1 = fit_tail_rate(t, x1, 1e-3, 0.5, 0.9);
  CHECK(r1.fitted_rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r1.passed);
  const auto r2 = fit_tail_rate(t, x2, 1e-3, 0.5, 0.9);
  CHECK(r2.fitted_rate == doctest::Approx(0.5).epsilon(1e-9));
  const std::span<const double> tt(t), xx(x2);
  const auto late = fit_tail_rate(tt.subspan(1400), xx.subspan(1400), 1.0, 0.5, 0.9);
  CHECK(std::abs(late.fitted_rate - 0.5) > std::abs(r2.fitted_rate - 0.5));
  const std::vector<double> few_t{0, 1, 2}, few_x{1e-5, 2e-5, 3e-5};
  CHECK_THROWS_AS(fit_tail_rate(few_t, few_x, 1.0, 0.5, 0.9), Error);
}

TEST_CASE("crossing counts") {
  const std::vector<double> v{1, 3, 1, 3, 2.0000001, 1};
  CHECK(count_crossings(v, 2.0, 1e-3) == 4);
  const std::vector<double> flat(50, 2.0);
  CHECK(count_crossings(flat, 2.0, 1e-7) == 0);
}

namespace {

WaveProfile constant_profile(double kappa, double c, auto&& shape) {
  WaveProfile w;
  w.c = c;
  w.epsilon = 1.0 / (c * c);
  const auto q = quad_roots(w.epsilon);
  w.lambda = q.lambda_neg;
  w.mu = q.mu_pos;
  w.kappa = kappa;
  w.converged = true;
  w.x = sample(-20, 20, 0.01, shape);
  w.x.left = {kappa, 0.0, 0.0};
  w.x.right = {kappa, 0.0, 0.0};
  return w;
}

}  // namespace

TEST_CASE("constant profile: no crossings and an exact identity") {
  const auto w = constant_profile(2.0, 1.5, [](double) { return 2.0; });
  const auto tail = classify_tail(w, BirthFunction::nicholson(std::exp(2.0)), 1.0);
  CHECK(tail.crossings == 0);
  CHECK(tail.observed == TailClass::MonotoneApproach);
  CHECK(voc_identity_check(w, nich_e2, 1.0, -3.0, 4.0) < 1e-12);
}

TEST_CASE("a perturbed profile fails the identity") {
  const double b = 5.0;
  const auto w = constant_profile(2.0, 1.5, [&](double t) {
    const double s = (t - b) / 0.1;
    return 2.0 + 0.01 * std::exp(-s * s);
  });
  CHECK(voc_identity_check(w, nich_e2, 1.0, b - 0.5, b) > 1e-3);
  CHECK_THROWS_AS(voc_identity_check(w, nich_e2, 1.0, b - 0.5, b + 0.05), Error);
}
