#include "wavefront/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "numerics.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/error.hpp"
#include "wavefront/speeds.hpp"

namespace wavefront {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double ExpTail::at(double offset) const {
  if (amplitude == 0.0) return constant;
  return constant + amplitude * std::exp(rate * offset);
}

double MeshFunction::operator()(double t) const {
  const std::size_t n = values.size();
  if (t < t0) return left.at(t - t0);
  if (t > t_end()) return right.at(t - t_end());
  const double u = (t - t0) / dt;
  const auto j = std::min<std::size_t>(static_cast<std::size_t>(u), n - 2);
  if (n < 4) {
    const double f = u - static_cast<double>(j);
    return (1.0 - f) * values[j] + f * values[j + 1];
  }
  const std::size_t first = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(j) - 1, 0,
                                                       static_cast<std::ptrdiff_t>(n) - 4);
  const double s = u - static_cast<double>(first);
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    double basis = 1.0;
    for (int m = 0; m < 4; ++m)
      if (m != k) basis *= (s - m) / (k - m);
    sum += basis * values[first + k];
  }
  return sum;
}

double ConeBounds::lower(double t) const {
  return t <= 0.0 ? delta * (std::exp(lambda1 * t) - std::exp(lambda2 * t)) : 0.0;
}

double ConeBounds::upper(double t) const { return delta * std::exp(lambda1 * t); }

double cone_delta(const BirthFunction& g, double kappa) {
  if (g.kind() == BirthKind::PiecewiseLinearCap) return g.params()[1];
  const double a0 = g.slope_at_zero();
  double delta = 0.01 * kappa;
  for (int attempt = 0; attempt < 60; ++attempt) {
    bool ok = true;
    for (int k = 1; k <= 100 && ok; ++k) {
      const double x = delta * k / 100.0;
      ok = std::abs(g(x) - a0 * x) <= 0.05 * a0 * x;
    }
    if (ok) return delta;
    delta *= 0.5;
  }
  throw Error(ErrorKind::DomainError, "g is not close to linear near 0");
}

namespace {

// Shared body of apply_A and apply_L: `f` is the forcing and `df` its slope,
// used to linearise the forcing about the tail constants.
template <class F, class DF>
std::vector<double> apply_green(const MeshFunction& x, F&& f, DF&& df, double h, double epsilon, Exec exec) {
  const std::size_t n = x.size();
  if (n < 4) throw Error(ErrorKind::GridError, "mesh needs at least 4 nodes");
  if (!(x.dt > 0.0)) throw Error(ErrorKind::GridError, "mesh step must be positive");
  if (!(h >= 0.0)) throw Error(ErrorKind::DomainError, "delay must be nonnegative");
  const double mr = h / x.dt;
  const auto m = static_cast<std::size_t>(std::llround(mr));
  if (std::abs(mr - static_cast<double>(m)) > 1e-9 * std::max(1.0, mr))
    throw Error(ErrorKind::GridError, "delay " + num(h) + " is not a multiple of the mesh step " + num(x.dt));

  const auto [lambda, mu] = quad_roots(epsilon);
  if (!(x.right.amplitude == 0.0 || x.right.rate < mu))
    throw Error(ErrorKind::GridError, "right tail grows faster than the kernel decays");
  if (!(x.left.amplitude == 0.0 || x.left.rate > lambda))
    throw Error(ErrorKind::GridError, "left tail decays slower than the kernel");

  // Forcing on s_j = t0 + j dt, j < n + m, so the last node sits at t_end + h.
  std::vector<double> G(n + m);
  for (std::size_t j = 0; j < m; ++j) G[j] = f(x.left.at((static_cast<double>(j) - static_cast<double>(m)) * x.dt));
  for (std::size_t j = m; j < n + m; ++j) G[j] = f(x.values[j - m]);

  // Tail forcing, linearised: G(s) ~ g(C) + g'(C) A e^{r (s - h - edge)}.
  const double gl_c = f(x.left.constant);
  const double gl_a = x.left.amplitude == 0.0 ? 0.0 : df(x.left.constant) * x.left.amplitude *
                                                          std::exp(-x.left.rate * h);
  const double gr_c = f(x.right.constant);
  const double gr_a = x.right.amplitude == 0.0 ? 0.0 : df(x.right.constant) * x.right.amplitude;
  double left_tail = gl_c / (-lambda);
  if (gl_a != 0.0) left_tail += gl_a / (x.left.rate - lambda);
  double right_tail = gr_c / mu;
  if (gr_a != 0.0) right_tail += gr_a / (mu - x.right.rate);

  std::vector<double> out(n);
  green_sweep(G, green_weights(lambda, mu, x.dt), left_tail, right_tail, out, exec);
  const double scale = 1.0 / (epsilon * (mu - lambda));
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace

std::vector<double> apply_A(const MeshFunction& x, const BirthFunction& g, double h, double epsilon, Exec exec) {
  return apply_green(
      x, [&](double v) { return g(std::max(v, 0.0)); }, [&](double v) { return g.slope(std::max(v, 0.0)); }, h,
      epsilon, exec);
}

std::vector<double> apply_L(const MeshFunction& x, double slope, double h, double epsilon, Exec exec) {
  return apply_green(
      x, [&](double v) { return slope * v; }, [&](double) { return slope; }, h, epsilon, exec);
}

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

// Same function on a mesh with half the step; odd nodes interpolated.
MeshFunction refine(const MeshFunction& x) {
  MeshFunction f = x;
  f.dt = 0.5 * x.dt;
  f.values.assign(2 * x.size() - 1, 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = i % 2 == 0 ? x.values[i / 2] : x(f.t(i));
  return f;
}

}  // namespace

WaveProfile solve_profile(const BirthFunction& g, double h, double c, const SolverConfig& cfg) {
  if (!(h >= 0.0)) throw Error(ErrorKind::DomainError, "delay must be nonnegative, got " + num(h));
  if (!(c > 0.0)) throw Error(ErrorKind::DomainError, "speed must be positive, got " + num(c));
  const StructureReport report = analyze_structure(g);
  const double a0 = report.a0_plus;
  const MinimalSpeed fold = minimal_speed(a0, h);

  WaveProfile w;
  w.c = c;
  w.h = h;
  w.epsilon = 1.0 / (c * c);
  w.kappa = report.kappa;
  w.gamma = report.gamma;
  w.zeta1 = report.zeta1;
  w.zeta2 = report.zeta2;
  if (w.epsilon >= fold.epsilon0)
    throw Error(ErrorKind::SpeedBelowMinimal, "c = " + num(c) + " does not exceed c_star = " + num(fold.c_star));
  const auto pair = real_root_pair({a0, h, w.epsilon});
  if (!pair || pair->at_fold)
    throw Error(ErrorKind::SpeedBelowMinimal, "c = " + num(c) + " is at the fold, c_star = " + num(fold.c_star));
  const QuadRoots q = quad_roots(w.epsilon);
  w.lambda = q.lambda_neg;
  w.mu = q.mu_pos;
  w.lambda1 = pair->lambda1;
  w.lambda2 = pair->lambda2;
  w.delta = cone_delta(g, w.kappa);

  const SpeedInterval iv = speed_interval(a0, w.gamma, h);
  if (iv.upper == UpperKind::Empty || (iv.upper == UpperKind::Finite && c > iv.upper_value))
    w.warnings.push_back("c lies outside the proven speed interval");

  double dt = cfg.dt > 0.0 ? cfg.dt : (h > 0.0 ? std::min(h / 20.0, 0.05) : 0.05);
  if (h > 0.0) dt = h / std::ceil(h / dt - 1e-9);
  if (w.lambda2 * dt > 5.0) w.warnings.push_back("stiff mesh: lambda2 * dt = " + num(w.lambda2 * dt));

  const double t_minus = std::min(40.0 / w.lambda1, 400.0);
  const double t_plus = 40.0 * h + 40.0;
  const auto n_left = static_cast<std::size_t>(std::ceil(t_minus / dt));
  const auto n_right = static_cast<std::size_t>(std::ceil(t_plus / dt));

  MeshFunction& x = w.x;
  x.dt = dt;
  x.t0 = -static_cast<double>(n_left) * dt;
  x.values.resize(n_left + n_right + 1);
  // phi+ translated so that its linear asymptote passes kappa/2 at t = 0;
  // the amplitude stays pinned and keeps the front near the origin.
  const double amp = 0.5 * w.kappa;
  for (std::size_t i = 0; i < x.size(); ++i) x.values[i] = std::min(amp * std::exp(w.lambda1 * x.t(i)), w.kappa);
  x.left = {0.0, amp * std::exp(w.lambda1 * x.t0), w.lambda1};
  x.right = {w.kappa, 0.0, 0.0};

  const double box = 1.1 * w.zeta2;
  double omega = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (w.iterations = 1; w.iterations <= cfg.max_iters; ++w.iterations) {
    const std::vector<double> y = apply_A(x, g, h, w.epsilon, cfg.exec);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!(y[i] >= -1e-8 * w.kappa && y[i] <= box))
        throw Error(ErrorKind::DivergedOutOfCone, "iterate " + std::to_string(w.iterations) + " left [0, " +
                                                      num(box) + "] at t = " + num(x.t(i)) + ": " + num(y[i]));
    }
    const double res = sup_diff(y, x.values);
    w.iteration_residual = res;
    if (res < cfg.tol) {
      w.converged = true;
      break;
    }
    if (res > prev) omega = std::max(0.5 * omega, 1.0 / 64.0);
    prev = res;
    for (std::size_t i = 0; i < y.size(); ++i) x.values[i] = (1.0 - omega) * x.values[i] + omega * y[i];
  }
  w.iterations = std::min(w.iterations, cfg.max_iters);
  w.omega = omega;

  // Shift the mesh so the first upward passage through kappa/2 sits at t = 0.
  const double half = 0.5 * w.kappa;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x.values[i - 1] < half && x.values[i] >= half) {
      const double ts = detail::bisect([&](double t) { return x(t) - half; }, x.t(i - 1), x.t(i));
      x.t0 -= ts;
      break;
    }
  }

  const MeshFunction fine = refine(x);
  const std::vector<double> y = apply_A(fine, g, h, w.epsilon, cfg.exec);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(y[2 * i] - x.values[i]));
  w.residual_sup = res;
  return w;
}

AsymptoticsReport fit_tail_rate(std::span<const double> t, std::span<const double> x, double threshold,
                                double lambda1, double lambda2) {
  std::size_t first = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1e-300 && x[i] < threshold) {
      first = i;
      break;
    }
  }
  std::size_t last = first;
  while (last < x.size() && x[last] > 1e-300 && x[last] < threshold && x[last] <= 10.0 * x[first]) ++last;
  const std::size_t n = last - first;
  if (first == x.size() || n < 8)
    throw Error(ErrorKind::InsufficientTail, "only " + std::to_string(first == x.size() ? 0 : n) +
                                                 " tail samples below " + num(threshold));

  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (std::size_t i = first; i < last; ++i) {
    const double ly = std::log(x[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
    syy += ly * ly;
  }
  const double dn = static_cast<double>(n);
  const double vt = stt - st * st / dn;
  const double vy = syy - sy * sy / dn;
  const double cov = sty - st * sy / dn;

  AsymptoticsReport r;
  r.fitted_rate = cov / vt;
  r.r_squared = vy > 0.0 ? cov * cov / (vt * vy) : 1.0;
  r.window_begin = t[first];
  r.window_end = t[last - 1];
  const double gap1 = std::abs(r.fitted_rate - lambda1) / lambda1;
  const double gap2 = std::abs(r.fitted_rate - lambda2) / lambda2;
  r.target_index = gap1 <= gap2 ? 1 : 2;
  r.target_rate = r.target_index == 1 ? lambda1 : lambda2;
  r.relative_gap = std::min(gap1, gap2);
  r.passed = r.relative_gap < 1e-2;
  return r;
}

AsymptoticsReport check_asymptotics(const WaveProfile& w) {
  std::vector<double> t(w.x.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = w.x.t(i);
  return fit_tail_rate(t, w.x.values, w.delta / 10.0, w.lambda1, w.lambda2);
}

std::string_view to_string(TailClass c) {
  switch (c) {
    case TailClass::MonotoneApproach: return "monotone";
    case TailClass::OscillatoryAboutKappa: return "oscillatory";
    case TailClass::Undetermined: return "undetermined";
  }
  return "?";
}

int count_crossings(std::span<const double> values, double level, double noise) {
  int crossings = 0;
  int sign = 0;
  for (double v : values) {
    const double d = v - level;
    if (std::abs(d) <= noise) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) ++crossings;
    sign = s;
  }
  return crossings;
}

TailReport classify_tail(const WaveProfile& w, const BirthFunction& g, double h) {
  TailReport r;
  const double gamma = g.slope(w.kappa);
  if (gamma != 0.0) {
    const CharParams p{gamma, h, w.epsilon};
    if (negative_real_roots(p).empty() && imaginary_axis_roots(p, std::abs(gamma) + 1.0).empty())
      r.predicted = TailClass::OscillatoryAboutKappa;
  }
  const std::span<const double> tail(w.x.values.data() + w.x.size() / 2, w.x.size() - w.x.size() / 2);
  r.crossings = count_crossings(tail, w.kappa, 1e-7 * w.kappa);
  r.observed = r.crossings >= 2 ? TailClass::OscillatoryAboutKappa : TailClass::MonotoneApproach;
  r.consistent = !(r.predicted == TailClass::OscillatoryAboutKappa && r.observed != TailClass::OscillatoryAboutKappa);
  return r;
}

namespace {

double derivative(const MeshFunction& x, double t) {
  const double eta = x.dt / 8.0;
  return (x(t + eta) - x(t - eta)) / (2.0 * eta);
}

}  // namespace

std::vector<double> profile_extrema(const MeshFunction& x) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double d0 = x.values[i] - x.values[i - 1];
    const double d1 = x.values[i + 1] - x.values[i];
    if (d0 == 0.0 || (d0 > 0.0) == (d1 > 0.0)) continue;
    auto dx = [&](double t) { return derivative(x, t); };
    double lo = x.t(i - 1), hi = x.t(i + 1);
    if ((dx(lo) > 0.0) == (dx(hi) > 0.0)) continue;
    out.push_back(detail::bisect(dx, lo, hi));
  }
  return out;
}

double voc_identity_check(const WaveProfile& w, const BirthFunction& g, double h, double a, double b) {
  if (!(b > a)) throw Error(ErrorKind::DomainError, "need a < b");
  const MeshFunction& x = w.x;
  const double slope = derivative(x, b);
  if (!(std::abs(slope) < 1e-4))
    throw Error(ErrorKind::NotAnExtremum, "x'(" + num(b) + ") = " + num(slope) + " is not near zero");

  // 8-point Gauss-Legendre on pieces no longer than dt/2.
  static constexpr std::array<double, 4> node{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                              0.9602898564975363};
  static constexpr std::array<double, 4> weight{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                0.1012285362903763};
  auto integrand = [&](double u) {
    return (std::exp(w.lambda * (a - u)) - std::exp(w.mu * (a - u))) * g(std::max(x(u - h), 0.0));
  };
  const auto pieces = static_cast<int>(std::ceil((b - a) / (0.5 * x.dt)));
  const double len = (b - a) / pieces;
  double integral = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double mid = a + (k + 0.5) * len;
    double s = 0.0;
    for (int q = 0; q < 4; ++q)
      s += weight[q] * (integrand(mid - 0.5 * len * node[q]) + integrand(mid + 0.5 * len * node[q]));
    integral += 0.5 * len * s;
  }
  const double bracket = x(a) + integral / (w.epsilon * (w.mu - w.lambda));
  return std::abs(x(b) - xi(b - a, w.c) * bracket);
}

ProfileInvariants profile_invariants(const WaveProfile& w, const BirthFunction& g) {
  ProfileInvariants r;
  const auto& v = w.x.values;
  const std::size_t n = v.size();
  r.min_value = *std::min_element(v.begin(), v.end());
  r.max_value = *std::max_element(v.begin(), v.end());
  const auto third = v.begin() + static_cast<std::ptrdiff_t>(n - n / 3);
  r.trailing_min = *std::min_element(third, v.end());
  r.trailing_max = *std::max_element(third, v.end());
  for (std::size_t i = 1; i + 1 < n; ++i)
    r.max_slope = std::max(r.max_slope, std::abs(v[i + 1] - v[i - 1]) / (2.0 * w.x.dt));
  double gmax = 0.0;
  for (int k = 0; k <= 10000; ++k) gmax = std::max(gmax, g(std::max(r.max_value, 0.0) * k / 10000.0));
  r.slope_bound = gmax / (w.epsilon * (w.mu - w.lambda));
  const double tol = 1e-3 * std::min(1.0, w.zeta2);
  r.nonnegative = r.min_value >= -1e-12;
  r.bounded = r.max_value <= w.zeta2 + tol;
  r.permanent = r.trailing_min >= w.zeta1 - tol && r.trailing_max <= w.zeta2 + tol;
  r.slope_ok = r.max_slope <= r.slope_bound + 1e-6;
  return r;
}

}  // namespace wavefront
