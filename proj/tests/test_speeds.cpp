#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wavefront/birthfn.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/error.hpp"
#include "wavefront/speeds.hpp"

using namespace wavefront;

namespace {

// Direct evaluation from the quadratic formula.
double xi_ref(double h, double c) {
  const double eps = 1.0 / (c * c);
  const double d = std::sqrt(1.0 + 4.0 * eps);
  const double lam = (1.0 - d) / (2.0 * eps), mu = (1.0 + d) / (2.0 * eps);
  return (mu - lam) / (mu * std::exp(-lam * h) - lam * std::exp(-mu * h));
}

}  // namespace

TEST_CASE("xi examples") {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  const double expected = std::sqrt(5.0) / (phi * std::exp(phi - 1) + (phi - 1) * std::exp(-phi));
  CHECK(xi(1.0, 1.0) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(xi(1.0, 1.0) == doctest::Approx(0.7157).epsilon(1e-4));
  CHECK(xi(1e-9, 3.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(xi(1.0, 1e4) == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("xi bounds and monotonicity on a grid") {
  for (int i = 0; i < 50; ++i) {
    const double h = 0.02 + 5.0 * i / 49;
    double prev = 2.0;
    for (int j = 0; j < 50; ++j) {
      const double c = 0.1 * std::pow(1e4, j / 49.0);
      const double v = xi(h, c);
      CHECK(v >= std::exp(-h) - 1e-15);
      CHECK(v < 1.0);
      CHECK(v == doctest::Approx(xi_ref(h, c)).epsilon(1e-10));
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("threshold") {
  CHECK(xi_threshold(-1.0) == 0.0);
  CHECK(xi_threshold(-2.0) == doctest::Approx(0.4));
  for (double g = -1.0; g <= 0.0; g += 0.05) CHECK(xi_threshold(g) <= 1e-15);
}

TEST_CASE("Nicholson p = e^2 has an infinite interval") {
  const auto r = analyze_structure(BirthFunction::nicholson(std::exp(2.0)));
  for (double h : {0.1, 1.0, 3.0, 10.0}) {
    const auto s = speed_interval(r, h);
    CHECK(s.upper == UpperKind::Infinite);
    CHECK(s.c_star == doctest::Approx(minimal_speed(r.a0_plus, h).c_star).epsilon(1e-12));
  }
}

TEST_CASE("Nicholson p = e^3") {
  const double a = std::exp(3.0);
  const auto s = speed_interval(a, -2.0, 0.5);
  CHECK(s.threshold == doctest::Approx(0.4));
  CHECK(s.upper == UpperKind::Infinite);

  const auto f = speed_interval(a, -2.0, 1.2);
  const double at_star = xi_ref(1.2, f.c_star);
  if (at_star >= 0.4) {
    REQUIRE(f.upper == UpperKind::Finite);
    CHECK(xi_ref(1.2, f.upper_value) == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(f.upper_value >= f.c_star);
    for (int k = 1; k < 20; ++k) {
      const double c = f.c_star + (f.upper_value - f.c_star) * k / 20;
      CHECK(xi_ref(1.2, c) > 0.4);
    }
  } else {
    CHECK(f.upper == UpperKind::Empty);
  }
}

TEST_CASE("Empty interval when xi at c_star misses the threshold") {
  // Very negative gamma pushes the threshold toward 1.
  const auto s = speed_interval(std::exp(3.0), -50.0, 3.0);
  CHECK(s.upper == UpperKind::Empty);
  CHECK(s.xi_at_c_star < s.threshold);
}

TEST_CASE("speed_interval rejects a0 <= 1") {
  CHECK_THROWS_AS(speed_interval(1.0, -1.0, 1.0), Error);
}

TEST_CASE("c_opt_upper") {
  CHECK_FALSE(c_opt_upper(-1.0, 0.5).has_value());
  for (double c : {0.1, 1.0, 10.0}) CHECK(oracle::brute_force_count(-1.0, 0.5, 1.0 / (c * c)) == 1);

  const auto c = c_opt_upper(-3.0, 2.0);
  REQUIRE(c.has_value());
  CHECK(oracle::brute_force_count(-3.0, 2.0, 1.0 / std::pow(0.95 * *c, 2)) == 1);
  CHECK(oracle::brute_force_count(-3.0, 2.0, 1.0 / std::pow(1.05 * *c, 2)) > 1);
}
