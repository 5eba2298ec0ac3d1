#include "wavefront/charroots.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "numerics.hpp"
#include "wavefront/error.hpp"

namespace wavefront {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_params(const CharParams& p) {
  if (!(p.epsilon > 0.0)) throw Error(ErrorKind::DomainError, "epsilon must be positive, got " + num(p.epsilon));
  if (!(p.h >= 0.0)) throw Error(ErrorKind::DomainError, "delay h must be nonnegative, got " + num(p.h));
}

}  // namespace

QuadRoots quad_roots(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::DomainError, "epsilon must be positive");
  const double s = 1.0 + std::sqrt(1.0 + 4.0 * epsilon);
  // lambda in rationalised form; (1 - sqrt(1 + 4 eps))/(2 eps) cancels for small eps.
  return {-2.0 / s, s / (2.0 * epsilon)};
}

cplx psi(cplx z, const CharParams& p) {
  cplx v = p.epsilon * z * z - z - 1.0;
  if (p.a != 0.0) v += p.a * std::exp(-z * p.h);
  return v;
}

cplx psi_prime(cplx z, const CharParams& p) {
  cplx v = 2.0 * p.epsilon * z - 1.0;
  if (p.a != 0.0) v -= p.a * p.h * std::exp(-z * p.h);
  return v;
}

double psi(double z, const CharParams& p) {
  double v = p.epsilon * z * z - z - 1.0;
  if (p.a != 0.0) v += p.a * std::exp(-z * p.h);
  return v;
}

double psi_prime(double z, const CharParams& p) {
  double v = 2.0 * p.epsilon * z - 1.0;
  if (p.a != 0.0) v -= p.a * p.h * std::exp(-z * p.h);
  return v;
}

MinimalSpeed kpp_limit(double a) {
  if (!(a > 1.0)) throw Error(ErrorKind::WrongRegime, "minimal speed needs a > 1, got a = " + num(a));
  const double eps0 = 0.25 / (a - 1.0);
  return {2.0 * (a - 1.0), eps0, 2.0 * std::sqrt(a - 1.0)};
}

MinimalSpeed minimal_speed(double a, double h) {
  if (!(a > 1.0)) throw Error(ErrorKind::WrongRegime, "minimal speed needs a > 1, got a = " + num(a));
  if (!(h >= 0.0)) throw Error(ErrorKind::DomainError, "delay must be nonnegative, got h = " + num(h));
  if (h == 0.0) return kpp_limit(a);

  // a exp(-z h) = (2 + z)/(2 + h z) in logarithmic form; f(0) = ln a > 0.
  const double log_a = std::log(a);
  auto f = [&](double z) { return log_a - z * h - std::log1p(0.5 * z) + std::log1p(0.5 * h * z); };
  double upper = std::max(4.0 * log_a / h, 10.0);
  while (f(upper) >= 0.0) upper *= 2.0;
  double z0 = detail::bisect(f, 0.0, upper);
  double eps0 = (h * z0 + h + 1.0) / (h * z0 * z0 + 2.0 * z0);

  // Newton on psi = psi_z = 0 in (z, eps); keep a step only if it helps.
  auto residual = [&](double z, double e) {
    const CharParams q{a, h, e};
    return std::hypot(psi(z, q), psi_prime(z, q));
  };
  double res = residual(z0, eps0);
  for (int it = 0; it < 3 && res > 0.0; ++it) {
    const CharParams q{a, h, eps0};
    const double f1 = psi(z0, q);
    const double f2 = psi_prime(z0, q);
    const double ex = a * std::exp(-z0 * h);
    const double j11 = f2, j12 = z0 * z0;
    const double j21 = 2.0 * eps0 + ex * h * h, j22 = 2.0 * z0;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0) break;
    const double dz = (f1 * j22 - j12 * f2) / det;
    const double de = (j11 * f2 - j21 * f1) / det;
    const double zn = z0 - dz, en = eps0 - de;
    const double rn = residual(zn, en);
    if (!(rn < res)) break;
    z0 = zn;
    eps0 = en;
    res = rn;
  }
  return {z0, eps0, 1.0 / std::sqrt(eps0)};
}

std::optional<RealRootPair> real_root_pair(const CharParams& p) {
  check_params(p);
  if (!(p.a > 1.0)) throw Error(ErrorKind::WrongRegime, "real root pair needs a > 1, got a = " + num(p.a));
  const MinimalSpeed fold = minimal_speed(p.a, p.h);
  if (std::abs(p.epsilon - fold.epsilon0) < 1e-12) return RealRootPair{fold.z0, fold.z0, true};
  if (p.epsilon > fold.epsilon0) return std::nullopt;

  double l1, l2;
  if (p.h == 0.0) {
    const double disc = std::sqrt(1.0 - 4.0 * p.epsilon * (p.a - 1.0));
    l1 = 2.0 * (p.a - 1.0) / (1.0 + disc);
    l2 = (1.0 + disc) / (2.0 * p.epsilon);
  } else {
    // psi is strictly convex on the real line; bracket its minimiser.
    auto f = [&](double z) { return psi(z, p); };
    auto df = [&](double z) { return psi_prime(z, p); };
    double hi = quad_roots(p.epsilon).mu_pos;
    while (df(hi) <= 0.0) hi *= 2.0;
    const double zmin = detail::bisect(df, 0.0, hi);
    if (f(zmin) >= 0.0) return RealRootPair{fold.z0, fold.z0, true};
    double top = std::max(hi, zmin);
    while (f(top) <= 0.0) top *= 2.0;
    l1 = detail::newton_polish(f, df, detail::bisect(f, 0.0, zmin), 0.0, zmin);
    l2 = detail::newton_polish(f, df, detail::bisect(f, zmin, top), zmin, top);
    // psi(mu) = a e^{-mu h} > 0, so lambda2 < mu up to rounding.
    l2 = std::min(l2, quad_roots(p.epsilon).mu_pos);
  }
  if (l2 - l1 < 1e-6 * (1.0 + l2)) return RealRootPair{fold.z0, fold.z0, true};
  return RealRootPair{l1, l2, false};
}

double epsilon0_slope(double h, double e) {
  const double s = std::sqrt(4.0 * e * e + 4.0 * h * h * e + h * h);
  return e * (2.0 * h * e - e + 0.5 * (h + s)) / (h * (h * e + 0.5 * (h + s)));
}

std::vector<Epsilon0Point> epsilon0_curve(double a, std::span<const double> h_grid) {
  if (!(a > 1.0)) throw Error(ErrorKind::WrongRegime, "epsilon0 curve needs a > 1, got a = " + num(a));
  if (h_grid.empty()) throw Error(ErrorKind::DomainError, "empty h grid");
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > 0.0)) throw Error(ErrorKind::DomainError, "h grid must be positive, got " + num(h_grid[i]));
    if (i > 0 && !(h_grid[i] > h_grid[i - 1])) throw Error(ErrorKind::DomainError, "h grid must be ascending");
  }

  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;
  auto rhs = [](const State& y, State& dy, double h) { dy[0] = epsilon0_slope(h, y[0]); };
  const double anchor = 1.0 / std::log(a);

  std::vector<double> eps(h_grid.size());
  auto run = [&](std::vector<double> times, std::vector<std::size_t> slots, double dt) {
    if (times.size() < 2) return;
    State y{anchor};
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    std::size_t k = 0;
    odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), dt, [&](const State& s, double) {
      if (k > 0) eps[slots[k - 1]] = s[0];
      ++k;
    });
  };

  std::vector<double> up_t{1.0}, down_t{1.0};
  std::vector<std::size_t> up_i, down_i;
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (h_grid[i] == 1.0) {
      eps[i] = anchor;
    } else if (h_grid[i] > 1.0) {
      up_t.push_back(h_grid[i]);
      up_i.push_back(i);
    }
  }
  for (std::size_t i = h_grid.size(); i-- > 0;) {
    if (h_grid[i] < 1.0) {
      down_t.push_back(h_grid[i]);
      down_i.push_back(i);
    }
  }
  run(up_t, up_i, 1e-3);
  run(down_t, down_i, -1e-3);

  std::vector<Epsilon0Point> out;
  out.reserve(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    const double direct = minimal_speed(a, h_grid[i]).epsilon0;
    if (std::abs(eps[i] / direct - 1.0) > 1e-6)
      throw Error(ErrorKind::InconsistentResult, "ODE and fold solve disagree at h = " + num(h_grid[i]) + ": " +
                                                     num(eps[i]) + " vs " + num(direct));
    out.push_back({h_grid[i], eps[i], 1.0 / std::sqrt(eps[i])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Argument principle

double contour_radius(const CharParams& p) { return 2.0 * (1.0 + (1.0 + std::abs(p.a)) / p.epsilon); }

namespace {

/// Accumulates the continuous change of arg psi along parametrised paths.
class ArgTracker {
 public:
  explicit ArgTracker(const CharParams& p) : p_(p) {}

  template <class Path>
  double track(Path&& z, double s0, double s1, int pieces) {
    double total = 0.0;
    double sa = s0;
    cplx fa = value(z(sa));
    for (int i = 1; i <= pieces; ++i) {
      const double sb = s0 + (s1 - s0) * i / pieces;
      const cplx fb = value(z(sb));
      total += refine(z, sa, sb, fa, fb, 0);
      sa = sb;
      fa = fb;
    }
    return total;
  }

 private:
  cplx value(cplx z) const {
    const cplx f = psi(z, p_);
    const double d = std::abs(psi_prime(z, p_));
    if (std::abs(f) <= 1e-9 * d || std::abs(f) == 0.0)
      throw Error(ErrorKind::ContourDegeneracy, "root within 1e-9 of the contour near z = (" + num(z.real()) + ", " +
                                                    num(z.imag()) + ")");
    return f;
  }

  template <class Path>
  double refine(Path& z, double sa, double sb, cplx fa, cplx fb, int depth) {
    const double sm = 0.5 * (sa + sb);
    const cplx fm = value(z(sm));
    const double d1 = std::arg(fm / fa);
    const double d2 = std::arg(fb / fm);
    const double d = std::arg(fb / fa);
    if (std::abs(d1) < kPi / 4 && std::abs(d2) < kPi / 4 && std::abs(d1 + d2 - d) < 1e-9) return d;
    if (depth > 60) throw Error(ErrorKind::ContourDegeneracy, "argument tracking failed to resolve");
    return refine(z, sa, sm, fa, fm, depth + 1) + refine(z, sm, sb, fm, fb, depth + 1);
  }

  const CharParams& p_;
};

int pieces_for(double length, double h) {
  const double step = std::min(0.05, 0.25 / std::max(h, 1e-12));
  return std::clamp(static_cast<int>(std::ceil(length / step)), 1, 200000);
}

int round_winding(double total_arg) {
  const double w = total_arg / (2.0 * kPi);
  const double n = std::round(w);
  if (std::abs(w - n) > 0.25)
    throw Error(ErrorKind::ContourDegeneracy, "non-integer winding " + num(w));
  return static_cast<int>(n);
}

// Winding number of psi around the rectangle [x0, x1] x [y0, y1].
int rectangle_count(const CharParams& p, double x0, double x1, double y0, double y1) {
  ArgTracker tr(p);
  const double w = x1 - x0, ht = y1 - y0;
  auto piece = [&](double len) {
    return std::clamp(static_cast<int>(std::ceil(len * std::max(p.h, 1.0) / 0.25)), 4, 20000);
  };
  double total = 0.0;
  total += tr.track([&](double s) { return cplx(x0 + s, y0); }, 0.0, w, piece(w));
  total += tr.track([&](double s) { return cplx(x1, y0 + s); }, 0.0, ht, piece(ht));
  total += tr.track([&](double s) { return cplx(x1 - s, y1); }, 0.0, w, piece(w));
  total += tr.track([&](double s) { return cplx(x0, y1 - s); }, 0.0, ht, piece(ht));
  return round_winding(total);
}

std::vector<double> positive_real_roots(const CharParams& p, double R) {
  if (p.a > 1.0) {
    auto pair = real_root_pair(p);
    if (!pair) return {};
    return {pair->lambda1, pair->lambda2};
  }
  std::vector<double> out;
  auto f = [&](double z) { return psi(z, p); };
  auto df = [&](double z) { return psi_prime(z, p); };
  for (auto [lo, hi] : detail::sign_change_brackets(f, 0.0, R, 20000)) {
    out.push_back(detail::newton_polish(f, df, detail::bisect(f, lo, hi), lo, hi));
  }
  return out;
}

}  // namespace

RootCount count_right_halfplane(const CharParams& p, bool locate) {
  check_params(p);
  const double W = std::abs(p.a) + 1.0;  // no imaginary-axis roots above |omega| = |a|
  const double R = std::max(contour_radius(p), W + 1.0);

  // On |z| = R, Re z >= 0 the ratio q = psi/(eps z^2) stays in the disk
  // |q - 1| < 1; verify on a sample before relying on it.
  for (int k = 0; k <= 64; ++k) {
    const double th = -kPi / 2 + kPi * k / 64;
    const cplx z = std::polar(R, th);
    if (!(std::abs(psi(z, p) / (p.epsilon * z * z) - 1.0) < 1.0))
      throw Error(ErrorKind::InconsistentResult, "quadratic term does not dominate on the contour arc");
  }

  RootCount rc;
  const auto axis = imaginary_axis_roots(p, W);
  rc.has_imaginary_axis_root = !axis.empty();
  std::vector<double> omegas;
  for (cplx r : axis) omegas.push_back(r.imag());
  std::sort(omegas.begin(), omegas.end(), std::greater<>());

  ArgTracker tr(p);
  const cplx i(0.0, 1.0);
  constexpr double r_ind = 1e-6;

  // Upper half of the axis from iW down to the real axis, bulging into
  // Re z > 0 around axis roots so they stay outside.
  double axis_change = 0.0;
  double top = W;
  bool root_at_zero = false;
  for (double om : omegas) {
    if (om <= r_ind) {
      root_at_zero = true;
      break;
    }
    axis_change += tr.track([&](double s) { return i * s; }, top, om + r_ind, pieces_for(top - om - r_ind, p.h));
    axis_change += tr.track([&](double th) { return i * om + r_ind * std::exp(i * th); }, kPi / 2, -kPi / 2, 16);
    top = om - r_ind;
  }
  if (root_at_zero) {
    axis_change += tr.track([&](double s) { return i * s; }, top, r_ind, pieces_for(top, p.h));
    axis_change += tr.track([&](double th) { return r_ind * std::exp(i * th); }, kPi / 2, 0.0, 8);
  } else {
    axis_change += tr.track([&](double s) { return i * s; }, top, 0.0, pieces_for(top, p.h));
  }

  // Above W, Im psi(i omega) < 0, so the change is a difference of principal arguments.
  const cplx fW = psi(i * W, p);
  const cplx fR = psi(i * R, p);
  const double upper_change = std::arg(fW) - std::arg(fR);

  // Arc from -iR to iR: arg(eps z^2) turns by 2 pi; arg q changes by
  // 2 arg q(iR) because q(-iR) is its conjugate.
  const double arc_change = 2.0 * kPi + 2.0 * std::arg(fR / (p.epsilon * (i * R) * (i * R)));

  rc.n_right = round_winding(arc_change + 2.0 * upper_change + 2.0 * axis_change);

  if (locate && rc.n_right > 0) {
    const auto roots = right_halfplane_roots(p);
    if (!roots.empty()) {
      rc.dominant = *std::max_element(roots.begin(), roots.end(),
                                      [](cplx x, cplx y) { return x.real() < y.real(); });
    }
  }
  return rc;
}

RootCount count_right_halfplane_robust(const CharParams& p, bool locate) {
  CharParams q = p;
  for (int attempt = 0;; ++attempt) {
    try {
      return count_right_halfplane(q, locate);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourDegeneracy || attempt >= 4) throw;
      q.epsilon = p.epsilon * (1.0 + 1e-9 * (attempt + 1) * (attempt % 2 == 0 ? 1.0 : -1.0));
    }
  }
}

std::vector<cplx> right_halfplane_roots(const CharParams& p) {
  check_params(p);
  const double R = std::max(contour_radius(p), std::abs(p.a) + 2.0);
  std::vector<cplx> roots;
  for (double x : positive_real_roots(p, R)) roots.emplace_back(x, 0.0);

  // Complex roots come in conjugate pairs: search the open upper quadrant.
  constexpr double margin = 1e-7;
  struct Rect {
    double x0, x1, y0, y1;
    int count;
  };
  std::vector<Rect> stack;
  int total = 0;
  try {
    total = rectangle_count(p, margin, R, margin, R);
  } catch (const Error&) {
    total = rectangle_count(p, 2.3 * margin, R, 1.7 * margin, R);
  }
  if (total > 0) stack.push_back({margin, R, margin, R, total});

  auto newton = [&](cplx z) -> std::optional<cplx> {
    for (int k = 0; k < 60; ++k) {
      const cplx d = psi_prime(z, p);
      if (std::abs(d) == 0.0) return std::nullopt;
      const cplx step = psi(z, p) / d;
      z -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(psi(z, p)) > 1e-9 * (1.0 + std::abs(p.epsilon * z * z))) return std::nullopt;
    return z;
  };

  while (!stack.empty()) {
    Rect r = stack.back();
    stack.pop_back();
    const double w = r.x1 - r.x0, ht = r.y1 - r.y0;
    const cplx centre(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
    if (r.count == 1 && std::max(w, ht) < 0.05 * (1.0 + std::abs(centre))) {
      if (auto z = newton(centre); z && z->imag() > 0.0) {
        roots.push_back(*z);
        roots.push_back(std::conj(*z));
        continue;
      }
    }
    if (std::max(w, ht) < 1e-10 * (1.0 + std::abs(centre))) {
      // Multiple root: report the centre once per multiplicity.
      for (int k = 0; k < r.count; ++k) {
        roots.push_back(centre);
        roots.push_back(std::conj(centre));
      }
      continue;
    }
    for (double frac : {0.5137, 0.4789, 0.5321}) {
      try {
        Rect a = r, b = r;
        if (w >= ht) {
          const double xm = r.x0 + frac * w;
          a.x1 = xm;
          b.x0 = xm;
        } else {
          const double ym = r.y0 + frac * ht;
          a.y1 = ym;
          b.y0 = ym;
        }
        a.count = rectangle_count(p, a.x0, a.x1, a.y0, a.y1);
        b.count = r.count - a.count;
        if (a.count > 0) stack.push_back(a);
        if (b.count > 0) stack.push_back(b);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ContourDegeneracy) throw;
      }
    }
  }
  return roots;
}

std::vector<cplx> imaginary_axis_roots(const CharParams& p, double omega_max) {
  check_params(p);
  if (!(omega_max > 0.0)) throw Error(ErrorKind::DomainError, "omega_max must be positive");
  constexpr int n = 10000;
  const cplx i(0.0, 1.0);
  auto mag = [&](double w) { return std::abs(psi(i * w, p)); };

  std::vector<double> m(n + 1);
  for (int k = 0; k <= n; ++k) m[k] = mag(omega_max * k / n);

  std::vector<cplx> out;
  for (int k = 0; k <= n; ++k) {
    const bool left_ok = k == 0 || m[k] <= m[k - 1];
    const bool right_ok = k == n || m[k] < m[k + 1];
    if (!(left_ok && right_ok)) continue;
    // Golden-section refinement of |psi(i w)| on the neighbouring cells.
    double lo = omega_max * std::max(k - 1, 0) / n;
    double hi = omega_max * std::min(k + 1, n) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = mag(c), fd = mag(d);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
      if (fc < fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = mag(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = mag(d);
      }
    }
    double w = 0.5 * (lo + hi);
    if (k == 0 && mag(0.0) <= mag(w)) w = 0.0;
    if (mag(w) < 1e-10) {
      if (out.empty() || std::abs(out.back().imag() - w) > 1e-8) out.emplace_back(0.0, w);
    }
  }
  return out;
}

std::vector<double> negative_real_roots(const CharParams& p) {
  check_params(p);
  auto f = [&](double z) { return psi(z, p); };
  auto df = [&](double z) { return psi_prime(z, p); };
  double Z = std::max(contour_radius(p), 1.0);

  // For a < 0 the exponential eventually dominates on the negative axis;
  // push the scan far enough that no root can lie beyond it.
  std::vector<double> far_edges;
  if (p.a < 0.0 && p.h > 0.0) {
    auto dominated = [&](double y) {
      const double poly = p.epsilon * y * y + y;
      const double lexp = std::log(-p.a) + y * p.h;
      return lexp > std::log(poly) && p.h > (2.0 * p.epsilon * y + 1.0) / poly;
    };
    double y = Z;
    while (!dominated(y) && y < 1e7) {
      far_edges.push_back(y);
      y *= 1.25;
    }
    far_edges.push_back(y);
  }

  std::vector<double> out;
  auto add_bracket = [&](double lo, double hi) {
    if (lo == hi) {
      out.push_back(lo);
    } else {
      out.push_back(detail::newton_polish(f, df, detail::bisect(f, lo, hi), lo, hi));
    }
  };
  for (auto [lo, hi] : detail::sign_change_brackets(f, -Z, 0.0, 20000)) {
    if (hi < 0.0) add_bracket(lo, hi);
  }
  for (std::size_t k = 1; k < far_edges.size(); ++k) {
    for (auto [lo, hi] : detail::sign_change_brackets(f, -far_edges[k], -far_edges[k - 1], 200)) add_bracket(lo, hi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<AxisCrossing> first_axis_crossing(double a, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::DomainError, "epsilon must be positive");
  if (!(a * a > 1.0)) return std::nullopt;
  // |a|^2 = (eps w^2 + 1)^2 + w^2 from the real and imaginary parts of psi(i w) = 0.
  const double b = 2.0 * epsilon + 1.0;
  const double w2 = 2.0 * (a * a - 1.0) / (b + std::sqrt(b * b + 4.0 * epsilon * epsilon * (a * a - 1.0)));
  const double w = std::sqrt(w2);
  double theta = std::atan2(-w / a, (epsilon * w2 + 1.0) / a);
  if (theta <= 0.0) theta += 2.0 * kPi;
  return AxisCrossing{w, theta / w};
}

}  // namespace wavefront
