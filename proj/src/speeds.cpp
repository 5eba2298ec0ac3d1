#include "wavefront/speeds.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/error.hpp"

namespace wavefront {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(UpperKind kind) {
  switch (kind) {
    case UpperKind::Infinite: return "infinite";
    case UpperKind::Finite: return "finite";
    case UpperKind::Empty: return "empty";
  }
  return "?";
}

double xi(double h, double c) {
  if (!(h >= 0.0)) throw Error(ErrorKind::DomainError, "xi needs h >= 0, got " + num(h));
  if (!(c > 0.0)) throw Error(ErrorKind::DomainError, "xi needs c > 0, got " + num(c));
  const auto [lambda, mu] = quad_roots(1.0 / (c * c));
  return (mu - lambda) / (mu * std::exp(-lambda * h) - lambda * std::exp(-mu * h));
}

double xi_threshold(double gamma) { return (gamma * gamma + gamma) / (gamma * gamma + 1.0); }

SpeedInterval speed_interval(double a0_plus, double gamma, double h) {
  if (!(a0_plus > 1.0)) throw Error(ErrorKind::WrongRegime, "speed interval needs g'(0+) > 1, got " + num(a0_plus));
  if (!(h >= 0.0)) throw Error(ErrorKind::DomainError, "delay must be nonnegative, got " + num(h));
  SpeedInterval out;
  out.c_star = minimal_speed(a0_plus, h).c_star;
  out.gamma = gamma;
  out.threshold = xi_threshold(gamma);
  out.xi_at_c_star = xi(h, out.c_star);

  if (gamma >= 0.0 || std::exp(-h) > out.threshold) {
    out.upper = UpperKind::Infinite;
    return out;
  }
  if (out.xi_at_c_star < out.threshold) {
    out.upper = UpperKind::Empty;
    return out;
  }
  // xi decreases in c towards e^{-h} <= threshold.
  auto f = [&](double c) { return xi(h, c) - out.threshold; };
  double hi = 2.0 * out.c_star;
  const double cap = std::ldexp(out.c_star, 20);
  while (f(hi) >= 0.0) {
    if (hi >= cap) {
      out.upper = UpperKind::Infinite;
      return out;
    }
    hi *= 2.0;
  }
  out.upper = UpperKind::Finite;
  out.upper_value = f(out.c_star) == 0.0 ? out.c_star : detail::bisect(f, out.c_star, hi);
  return out;
}

SpeedInterval speed_interval(const StructureReport& report, double h) {
  return speed_interval(report.a0_plus, report.gamma, h);
}

std::optional<double> c_opt_upper(double gamma, double h) {
  if (!(gamma < 0.0)) throw Error(ErrorKind::DomainError, "c_opt_upper needs gamma < 0, got " + num(gamma));
  if (!(h >= 0.0)) throw Error(ErrorKind::DomainError, "delay must be nonnegative, got " + num(h));

  std::vector<std::pair<double, int>> probes;
  // A root within rounding of the imaginary axis marks the crossing itself.
  struct OnAxis {
    double c;
  };
  auto count = [&](double c) {
    int n;
    try {
      n = count_right_halfplane_robust({gamma, h, 1.0 / (c * c)}).n_right;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourDegeneracy) throw;
      throw OnAxis{c};
    }
    probes.emplace_back(c, n);
    return n;
  };
  auto check_monotone = [&] {
    for (const auto& [ci, ni] : probes)
      for (const auto& [cj, nj] : probes)
        if (ci < cj && ni > nj)
          throw Error(ErrorKind::InconsistentResult, "right-half-plane count not monotone in c: " +
                                                         std::to_string(ni) + " at c = " + num(ci) + ", " +
                                                         std::to_string(nj) + " at c = " + num(cj));
  };

  constexpr double c_cap = 1e3;
  double lo = 1.0, hi = 1.0;
  try {
    if (count(1.0) == 1) {
      do {
        lo = hi;
        hi *= 2.0;
        if (hi > c_cap) {
          if (count(c_cap) != 1) {
            hi = c_cap;
            break;
          }
          check_monotone();
          return std::nullopt;
        }
      } while (count(hi) == 1);
    } else {
      int halvings = 0;
      do {
        hi = lo;
        lo *= 0.5;
        if (++halvings > 60) throw Error(ErrorKind::InconsistentResult, "no speed with a single unstable root");
      } while (count(lo) != 1);
    }
    while (hi - lo > 1e-12 * hi) {
      const double mid = 0.5 * (lo + hi);
      (count(mid) == 1 ? lo : hi) = mid;
    }
  } catch (const OnAxis& at) {
    check_monotone();
    return at.c;
  }
  check_monotone();
  return lo;
}

}  // namespace wavefront
