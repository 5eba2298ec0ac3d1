#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/error.hpp"

using namespace wavefront;

namespace {

const double E = std::exp(1.0);

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("quad_roots") {
  const auto r = quad_roots(1.0);
  CHECK(r.lambda_neg == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-15));
  CHECK(r.mu_pos == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
  const auto small = quad_roots(1e-8);
  CHECK(small.lambda_neg == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(small.mu_pos == doctest::Approx(1e8).epsilon(1e-7));
  const auto q = quad_roots(0.25);
  CHECK(q.lambda_neg * q.mu_pos == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(q.lambda_neg + q.mu_pos == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("psi examples") {
  CHECK(std::abs(psi(cplx(0.0), {3.7, 0.4, 0.9}) - cplx(2.7)) < 1e-15);
  CHECK(std::abs(psi(1.0, {E, 1.0, 1.0})) < 1e-15);
  CHECK(psi(1.0, {2.0, 0.0, 1.0}) == doctest::Approx(1.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    const CharParams p{u(rng) * 3, u(rng) + 2.5, u(rng) + 2.5};
    const cplx z(u(rng), u(rng));
    CHECK(std::abs(psi(z, p) - oracle::psi(z, p.a, p.h, p.epsilon)) < 1e-12);
    CHECK(std::abs(psi_prime(z, p) - oracle::dpsi(z, p.a, p.h, p.epsilon)) < 1e-12);
  }
}

TEST_CASE("minimal_speed closed forms at h = 1") {
  const auto m = minimal_speed(E, 1.0);
  CHECK(std::abs(m.z0 - 1.0) < 1e-10);
  CHECK(std::abs(m.epsilon0 - 1.0) < 1e-10);
  CHECK(std::abs(m.c_star - 1.0) < 1e-10);
  const auto m2 = minimal_speed(2.0, 1.0);
  CHECK(m2.z0 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(m2.epsilon0 == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
  CHECK(m2.c_star == doctest::Approx(std::sqrt(std::log(2.0))).epsilon(1e-12));
  CHECK(minimal_speed(2.0, 1e-6).c_star == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(minimal_speed(5.0, 0.0).c_star == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(kind_of([] { minimal_speed(1.0, 1.0); }) == ErrorKind::WrongRegime);
}

TEST_CASE("fold residual and oracle agreement") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(1.0, 20.0), uh(0.0, 5.0);
  for (int k = 0; k < 50; ++k) {
    const double a = std::nextafter(ua(rng), 21.0);
    const double h = std::max(uh(rng), 1e-3);
    CAPTURE(a);
    CAPTURE(h);
    const auto m = minimal_speed(a, h);
    const CharParams p{a, h, m.epsilon0};
    CHECK(std::abs(psi(m.z0, p)) < 1e-8);
    CHECK(std::abs(psi_prime(m.z0, p)) < 1e-8);
    CHECK(m.epsilon0 == doctest::Approx(oracle::fold_epsilon(a, h)).epsilon(1e-8));
  }
}

TEST_CASE("real_root_pair") {
  const auto below = real_root_pair({E, 1.0, 0.5});
  REQUIRE(below.has_value());
  CHECK(below->lambda1 < 1.0);
  CHECK(below->lambda2 > 1.0);
  CHECK(std::abs(psi(below->lambda1, {E, 1.0, 0.5})) < 1e-12);
  CHECK(std::abs(psi(below->lambda2, {E, 1.0, 0.5})) < 1e-12);
  CHECK_FALSE(real_root_pair({E, 1.0, 1.5}).has_value());
  const auto fold = real_root_pair({2.0, 1.0, 1.0 / std::log(2.0)});
  REQUIRE(fold.has_value());
  CHECK(fold->at_fold);
  CHECK(fold->lambda1 == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(kind_of([] { real_root_pair({0.9, 1.0, 1.0}); }) == ErrorKind::WrongRegime);
}

TEST_CASE("ordering chain lambda < 0 < lambda1 < lambda2 < mu") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ua(1.05, 20.0), uh(0.05, 5.0), frac(0.05, 0.99);
  for (int k = 0; k < 100; ++k) {
    const double a = ua(rng), h = uh(rng);
    const double eps = frac(rng) * minimal_speed(a, h).epsilon0;
    const auto pair = real_root_pair({a, h, eps});
    REQUIRE(pair.has_value());
    const auto q = quad_roots(eps);
    CHECK(q.lambda_neg < 0.0);
    CHECK(0.0 < pair->lambda1);
    CHECK(pair->lambda1 < pair->lambda2);
    // lambda2 and mu coincide in double precision once a e^{-mu h} is below rounding.
    if (a * std::exp(-q.mu_pos * h) > 1e-12 * q.mu_pos) {
      CHECK(pair->lambda2 < q.mu_pos);
    } else {
      CHECK(pair->lambda2 <= q.mu_pos);
    }
  }
}

TEST_CASE("c_star bound and monotonicity on a grid") {
  for (int i = 0; i < 20; ++i) {
    const double a = 1.1 + (20.0 - 1.1) * i / 19;
    double prev = INFINITY;
    for (int j = 0; j < 20; ++j) {
      const double h = 0.05 + (5.0 - 0.05) * j / 19;
      const double c = minimal_speed(a, h).c_star;
      CHECK(c <= std::min(2 * std::sqrt(a - 1), std::sqrt(std::log(a) / h)) + 1e-9);
      CHECK(c < prev);
      prev = c;
    }
  }
}

TEST_CASE("epsilon0_curve") {
  const std::vector<double> one{1.0};
  const auto anchor = epsilon0_curve(E, one);
  REQUIRE(anchor.size() == 1);
  CHECK(anchor[0].epsilon0 == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const auto curve = epsilon0_curve(E, grid);
  CHECK(curve[0].epsilon0 < curve[1].epsilon0);
  CHECK(curve[1].epsilon0 < curve[2].epsilon0);
  CHECK(curve[0].c_star > curve[2].c_star);
  const std::vector<double> tiny{1e-6};
  CHECK(epsilon0_curve(2.0, tiny)[0].c_star == doctest::Approx(2.0).epsilon(1e-3));
  const std::vector<double> bad{0.0, 1.0};
  CHECK(kind_of([&] { epsilon0_curve(2.0, bad); }) == ErrorKind::DomainError);
}

TEST_CASE("epsilon0 slope matches the derivative of the fold") {
  for (double a : {1.5, E, 7.0}) {
    for (double h : {0.3, 1.0, 2.5}) {
      const double s = 1e-5;
      const double fd = (minimal_speed(a, h + s).epsilon0 - minimal_speed(a, h - s).epsilon0) / (2 * s);
      CHECK(epsilon0_slope(h, minimal_speed(a, h).epsilon0) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("right-half-plane counts for a = e, h = 1") {
  int prev = 1 << 30;
  for (double eps : {0.25, 0.5, 1.0, 1.5, 2.0}) {
    const auto rc = count_right_halfplane_robust({E, 1.0, eps});
    CHECK(rc.n_right == oracle::brute_force_count(E, 1.0, eps));
    CHECK(rc.n_right <= prev);
    prev = rc.n_right;
  }
  CHECK(count_right_halfplane({E, 1.0, 0.5}).n_right >= 2);
}

TEST_CASE("slope -1: a single real dominant root") {
  const auto rc = count_right_halfplane({-1.0, 0.5, 1.0}, true);
  CHECK(rc.n_right == 1);
  CHECK(rc.n_right == oracle::brute_force_count(-1.0, 0.5, 1.0));
  REQUIRE(rc.dominant.has_value());
  CHECK(std::abs(rc.dominant->imag()) < 1e-9);
  CHECK(rc.dominant->real() > 0.0);
  CHECK(std::abs(psi(*rc.dominant, {-1.0, 0.5, 1.0})) < 1e-10);
}

TEST_CASE("argument principle agrees with the brute-force scan") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ua(-5.0, 5.0), uh(0.1, 3.0), ue(0.3, 3.0);
  for (int k = 0; k < 25; ++k) {
    const CharParams p{ua(rng), uh(rng), ue(rng)};
    CAPTURE(p.a);
    CAPTURE(p.h);
    CAPTURE(p.epsilon);
    const auto rc = count_right_halfplane_robust(p);
    CHECK(rc.n_right == oracle::brute_force_count(p.a, p.h, p.epsilon));
    CHECK(right_halfplane_roots(p).size() == static_cast<std::size_t>(rc.n_right));
  }
}

TEST_CASE("N(eps) is non-increasing in eps") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> ua(-4.0, 6.0), uh(0.2, 3.0);
  for (int s = 0; s < 5; ++s) {
    const double a = ua(rng), h = uh(rng);
    int prev = 1 << 30;
    for (double eps = 0.2; eps <= 3.0; eps += 0.4) {
      const int n = count_right_halfplane_robust({a, h, eps}).n_right;
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("Hopf crossing for slope -2") {
  const auto [w, h] = oracle::hopf_point(-2.0, 1.0);
  REQUIRE(std::isfinite(h));
  const auto crossing = first_axis_crossing(-2.0, 1.0);
  REQUIRE(crossing.has_value());
  CHECK(crossing->omega == doctest::Approx(w).epsilon(1e-9));
  CHECK(crossing->h == doctest::Approx(h).epsilon(1e-9));
  const CharParams at{-2.0, crossing->h, 1.0};
  const auto roots = imaginary_axis_roots(at, 10.0);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].imag() == doctest::Approx(w).epsilon(1e-6));
  CHECK(std::abs(psi(roots[0], at)) < 1e-10);
  CHECK(count_right_halfplane_robust({-2.0, 0.9 * h, 1.0}).n_right == 1);
  CHECK(count_right_halfplane_robust({-2.0, 1.1 * h, 1.0}).n_right == 3);
  CHECK_FALSE(first_axis_crossing(-0.5, 1.0).has_value());
}

TEST_CASE("imaginary_axis_roots examples") {
  for (const auto& r : imaginary_axis_roots({E, 1.0, 1.0}, 10.0)) CHECK(std::abs(r.imag()) > 0.0);
  for (double h : {0.1, 1.0, 5.0}) CHECK(imaginary_axis_roots({-0.5, h, 1.0}, 10.0).empty());
}

TEST_CASE("negative_real_roots") {
  const auto q = negative_real_roots({0.0, 1.0, 1.0});
  REQUIRE(q.size() == 1);
  CHECK(q[0] == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-12));
  for (const CharParams p : {CharParams{E, 1.0, 1.0}, CharParams{-1.0, 0.5, 1.0}, CharParams{-1.0, 3.0, 0.2}}) {
    const auto roots = negative_real_roots(p);
    for (double r : roots) {
      CHECK(r < 0.0);
      CHECK(std::abs(psi(r, p)) < 1e-8 * (1.0 + std::abs(p.a) * std::exp(-r * p.h)));
    }
    // Independent fine scan on the same range.
    const double lo = roots.empty() ? -contour_radius(p) : std::min(roots.front(), -contour_radius(p));
    int changes = 0;
    double prev = psi(lo, p);
    for (int i = 1; i <= 200000; ++i) {
      const double z = lo + (-1e-12 - lo) * i / 200000;
      const double v = psi(z, p);
      if ((v > 0.0) != (prev > 0.0)) ++changes;
      prev = v;
    }
    CHECK(static_cast<int>(roots.size()) >= changes);
  }
}

TEST_CASE("contour radius dominates") {
  const CharParams p{3.0, 0.7, 0.4};
  const double R = contour_radius(p);
  for (int k = 0; k <= 400; ++k) {
    const double th = -M_PI / 2 + M_PI * k / 400;
    const cplx z = std::polar(R, th);
    CHECK(std::abs(p.epsilon * z * z) > std::abs(z) + 1.0 + std::abs(p.a));
  }
}
