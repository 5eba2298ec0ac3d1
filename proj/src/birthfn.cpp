#include "wavefront/birthfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "numerics.hpp"
#include "wavefront/error.hpp"

namespace wavefront {

namespace {

// Truncated Taylor series in the independent variable: c[k] = f^(k)(x0) / k!.
struct Taylor3 {
  std::array<double, 4> c{};

  double derivative(int k) const {
    static constexpr double fact[] = {1.0, 1.0, 2.0, 6.0};
    return fact[k] * c[k];
  }
};

Taylor3 operator/(const Taylor3& a, const Taylor3& b) {
  Taylor3 r;
  for (int k = 0; k < 4; ++k) {
    double s = a.c[k];
    for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
    r.c[k] = s / b.c[0];
  }
  return r;
}

// x^n expanded around x0 >= 0. Infinite coefficients are possible at x0 = 0
// when n is not an integer and n < k.
Taylor3 power_of_variable(double x0, double n) {
  Taylor3 r;
  double falling = 1.0;
  double fact = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (k > 0) {
      falling *= (n - (k - 1));
      fact *= k;
    }
    double coef;
    if (x0 > 0.0) {
      coef = falling * std::pow(x0, n - k);
    } else if (falling == 0.0 || n - k > 0.0) {
      coef = 0.0;
    } else if (n - k == 0.0) {
      coef = falling;
    } else {
      coef = std::numeric_limits<double>::infinity();
    }
    r.c[k] = coef / fact;
  }
  return r;
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "bad value for '" + key + "': '" + text + "'");
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::DomainError, msg);
}

}  // namespace

std::string_view to_string(BirthKind kind) {
  switch (kind) {
    case BirthKind::Nicholson: return "nicholson";
    case BirthKind::MackeyGlass: return "mackey-glass";
    case BirthKind::PiecewiseLinearCap: return "pwl-cap";
    case BirthKind::UserTabulated: return "tabulated";
  }
  return "unknown";
}

BirthFunction BirthFunction::nicholson(double p) {
  require(p > 0.0, "nicholson needs p > 0");
  return BirthFunction(BirthKind::Nicholson, {p});
}

BirthFunction BirthFunction::mackey_glass(double p, double n) {
  require(p > 0.0 && n > 1.0, "mackey-glass needs p > 0 and n > 1");
  return BirthFunction(BirthKind::MackeyGlass, {p, n});
}

BirthFunction BirthFunction::piecewise_linear_cap(double slope, double corner) {
  require(slope > 1.0 && corner > 0.0, "pwl-cap needs slope p > 1 and corner delta > 0");
  return BirthFunction(BirthKind::PiecewiseLinearCap, {slope, corner});
}

BirthFunction BirthFunction::tabulated(std::vector<double> x, std::vector<double> y) {
  require(x.size() == y.size() && x.size() >= 3, "tabulated g needs at least 3 (x, g) pairs");
  require(x.front() == 0.0 && y.front() == 0.0, "tabulated g must start at (0, 0)");
  for (std::size_t i = 1; i < x.size(); ++i) {
    require(x[i] > x[i - 1], "tabulated x must be strictly increasing");
    require(y[i] > 0.0, "tabulated g must be positive for x > 0");
  }
  BirthFunction g(BirthKind::UserTabulated, {});
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), m(n - 1), d(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    m[k] = (y[k + 1] - y[k]) / h[k];
  }
  // Fritsch-Carlson slopes with the usual shape-preserving end conditions.
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (m[k - 1] * m[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
  }
  auto edge = [](double h0, double h1, double m0, double m1) {
    double dd = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if ((dd > 0.0) != (m0 > 0.0) || dd == 0.0) return 0.0;
    if ((m0 > 0.0) != (m1 > 0.0) && std::abs(dd) > 3.0 * std::abs(m0)) return 3.0 * m0;
    return dd;
  };
  d[0] = edge(h[0], h[1], m[0], m[1]);
  d[n - 1] = edge(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
  g.tx_ = std::move(x);
  g.ty_ = std::move(y);
  g.td_ = std::move(d);
  return g;
}

BirthFunction BirthFunction::parse(std::string_view spec) {
  const std::string s(spec);
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::stringstream rest(s.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "expected key=value in '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::ParseError, "missing '" + key + "' in g-spec '" + s + "'");
    const double v = parse_number(key, it->second);
    kv.erase(it);
    return v;
  };
  auto finish = [&](BirthFunction g) {
    if (!kv.empty()) throw Error(ErrorKind::ParseError, "unknown key '" + kv.begin()->first + "' in '" + s + "'");
    return g;
  };

  if (name == "nicholson") {
    const double p = take("p");
    return finish(nicholson(p));
  }
  if (name == "mackey-glass" || name == "mackeyglass") {
    const double p = take("p");
    const double n = take("n");
    return finish(mackey_glass(p, n));
  }
  if (name == "pwl-cap" || name == "cap" || name == "piecewise-linear-cap") {
    const double p = take("p");
    const double delta = take("delta");
    return finish(piecewise_linear_cap(p, delta));
  }
  if (name == "tabulated") {
    auto it = kv.find("file");
    if (it == kv.end()) throw Error(ErrorKind::ParseError, "tabulated g-spec needs file=PATH");
    const std::string path = it->second;
    kv.erase(it);
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open table '" + path + "'");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> xs, ys;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(ErrorKind::ParseError, "bad table row '" + line + "'");
      xs.push_back(parse_number("x", line.substr(0, comma)));
      ys.push_back(parse_number("g", line.substr(comma + 1)));
    }
    BirthFunction g = tabulated(std::move(xs), std::move(ys));
    g.source_ = path;
    return finish(std::move(g));
  }
  throw Error(ErrorKind::ParseError, "unknown birth function '" + name + "'");
}

int BirthFunction::derivative_order() const {
  switch (kind_) {
    case BirthKind::Nicholson:
    case BirthKind::MackeyGlass: return 3;
    case BirthKind::PiecewiseLinearCap: return 1;
    case BirthKind::UserTabulated: return 0;
  }
  return 0;
}

double BirthFunction::eval(double x, int order) const {
  if (order < 0 || order > derivative_order())
    throw Error(ErrorKind::UnsupportedDerivative,
                "order " + std::to_string(order) + " requested from " + spec());
  if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, "g evaluated at negative x = " + format_number(x));

  switch (kind_) {
    case BirthKind::Nicholson: {
      const double p = params_[0];
      const double e = p * std::exp(-x);
      switch (order) {
        case 0: return x * e;
        case 1: return (1.0 - x) * e;
        case 2: return (x - 2.0) * e;
        default: return (3.0 - x) * e;
      }
    }
    case BirthKind::MackeyGlass: {
      const double p = params_[0];
      const double n = params_[1];
      if (order == 0) return p * x / (1.0 + std::pow(x, n));
      Taylor3 var;
      var.c = {x, 1.0, 0.0, 0.0};
      Taylor3 denom = power_of_variable(x, n);
      denom.c[0] += 1.0;
      const double d = (var / denom).derivative(order) * p;
      if (!std::isfinite(d))
        throw Error(ErrorKind::DomainError, "derivative of order " + std::to_string(order) + " unbounded at 0");
      return d;
    }
    case BirthKind::PiecewiseLinearCap: {
      const double p = params_[0];
      const double delta = params_[1];
      if (order == 0) return p * std::min(x, delta);
      return x < delta ? p : 0.0;
    }
    case BirthKind::UserTabulated: return eval_tabulated(x, 0);
  }
  return 0.0;
}

double BirthFunction::eval_tabulated(double x, int order) const {
  const std::size_t n = tx_.size();
  if (x >= tx_.back()) return order == 0 ? ty_.back() : 0.0;
  const auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - tx_.begin()) - 1, n - 2);
  const double h = tx_[k + 1] - tx_[k];
  const double t = (x - tx_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  if (order == 0) {
    return (2 * t3 - 3 * t2 + 1) * ty_[k] + (t3 - 2 * t2 + t) * h * td_[k] + (-2 * t3 + 3 * t2) * ty_[k + 1] +
           (t3 - t2) * h * td_[k + 1];
  }
  return ((6 * t2 - 6 * t) * ty_[k] + (3 * t2 - 4 * t + 1) * h * td_[k] + (-6 * t2 + 6 * t) * ty_[k + 1] +
          (3 * t2 - 2 * t) * h * td_[k + 1]) /
         h;
}

double BirthFunction::slope(double x) const {
  if (kind_ == BirthKind::UserTabulated) {
    if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, "g' evaluated at negative x");
    return eval_tabulated(x, 1);
  }
  return eval(x, 1);
}

double BirthFunction::slope_at_zero() const {
  if (kind_ == BirthKind::UserTabulated) return td_.front();
  return params_[0];
}

std::string BirthFunction::spec() const {
  switch (kind_) {
    case BirthKind::Nicholson: return "nicholson:p=" + format_number(params_[0]);
    case BirthKind::MackeyGlass:
      return "mackey-glass:p=" + format_number(params_[0]) + ",n=" + format_number(params_[1]);
    case BirthKind::PiecewiseLinearCap:
      return "pwl-cap:p=" + format_number(params_[0]) + ",delta=" + format_number(params_[1]);
    case BirthKind::UserTabulated: return "tabulated:file=" + source_;
  }
  return {};
}

double schwarzian(const BirthFunction& g, double x) {
  if (g.derivative_order() < 3)
    throw Error(ErrorKind::UnsupportedDerivative, "Schwarzian needs third derivatives of " + g.spec());
  const double d1 = g.eval(x, 1);
  if (std::abs(d1) < 1e-12)
    throw Error(ErrorKind::SingularSchwarzian, "g'(x) vanishes at x = " + format_number(x));
  const double r2 = g.eval(x, 2) / d1;
  return g.eval(x, 3) / d1 - 1.5 * r2 * r2;
}

SchwarzianEstimate schwarzian_estimate(const BirthFunction& g, double x) {
  if (g.derivative_order() >= 3) return {schwarzian(g, x), true};
  if (g.kind() != BirthKind::UserTabulated)
    throw Error(ErrorKind::UnsupportedDerivative, "Schwarzian undefined for " + g.spec());

  const double step = 1e-3 * (1.0 + x);
  if (x - 2.0 * step < 0.0) throw Error(ErrorKind::DomainError, "stencil leaves the domain at x = " + format_number(x));
  const double fm2 = g(x - 2 * step), fm1 = g(x - step), f0 = g(x), fp1 = g(x + step), fp2 = g(x + 2 * step);
  const double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step);
  const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * step * step);
  const double d3 = (-fm2 + 2 * fm1 - 2 * fp1 + fp2) / (2 * step * step * step);
  if (std::abs(d1) < 1e-12)
    throw Error(ErrorKind::SingularSchwarzian, "g'(x) vanishes at x = " + format_number(x));

  // The interpolant is a single cubic between nodes; across a node its
  // second derivative jumps and the stencil is meaningless.
  const auto nodes = g.table_nodes();
  const auto first = std::upper_bound(nodes.begin(), nodes.end(), x - 2 * step);
  const bool reliable = first == nodes.end() || *first >= x + 2 * step;
  const double r = d2 / d1;
  return {d3 / d1 - 1.5 * r * r, reliable};
}

std::vector<std::string> Hypotheses::labels() const {
  std::vector<std::string> out;
  if (H) out.emplace_back("H");
  if (L) out.emplace_back("L");
  if (B) out.emplace_back("B");
  return out;
}

std::pair<double, double> interval_image(const BirthFunction& g, std::optional<double> x_M, double lo, double hi) {
  const double glo = g(lo);
  const double ghi = g(hi);
  double mn = std::min(glo, ghi);
  double mx = std::max(glo, ghi);
  if (x_M && *x_M > lo && *x_M < hi) mx = std::max(mx, g(*x_M));
  return {mn, mx};
}

namespace {

constexpr int kScanPoints = 10000;

struct Extrema {
  std::vector<double> maxima;
  std::vector<double> minima;
};

Extrema critical_points(const BirthFunction& g, double hi) {
  Extrema out;
  auto d1 = [&](double x) { return g.slope(x); };
  for (auto [a, b] : detail::sign_change_brackets(d1, 1e-12, hi, kScanPoints)) {
    const bool rising = d1(a) > 0.0;
    double x = detail::bisect(d1, a, b);
    if (g.derivative_order() >= 2) {
      x = detail::newton_polish(d1, [&](double t) { return g.eval(t, 2); }, x, a, b);
    }
    (rising ? out.maxima : out.minima).push_back(x);
  }
  return out;
}

std::vector<double> positive_fixed_points(const BirthFunction& g, double hi) {
  std::vector<double> out;
  auto f = [&](double x) { return g(x) - x; };
  for (auto [a, b] : detail::sign_change_brackets(f, 1e-12, hi, kScanPoints)) {
    double x = detail::bisect(f, a, b);
    x = detail::newton_polish(f, [&](double t) { return g.slope(t) - 1.0; }, x, a, b);
    out.push_back(x);
  }
  return out;
}

double grid_min(const BirthFunction& g, double lo, double hi) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScanPoints; ++i) m = std::min(m, g(lo + (hi - lo) * i / kScanPoints));
  return m;
}

double grid_max(const BirthFunction& g, double lo, double hi) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScanPoints; ++i) m = std::max(m, g(lo + (hi - lo) * i / kScanPoints));
  return m;
}

}  // namespace

StructureReport analyze_structure(const BirthFunction& g) {
  StructureReport r;
  r.a0_plus = g.slope_at_zero();
  r.a0_minus = r.a0_plus;
  if (!(r.a0_plus > 1.0))
    throw Error(ErrorKind::NoPositiveFixedPoint, "g'(0+) = " + format_number(r.a0_plus) + " <= 1");

  // First pass on [0, 10], then widen to 10 max(x_M, kappa, 1) if needed.
  double hi = 10.0;
  Extrema ext = critical_points(g, hi);
  std::vector<double> fixed = positive_fixed_points(g, hi);
  double span = 1.0;
  if (!ext.maxima.empty()) span = std::max(span, ext.maxima.front());
  if (!fixed.empty()) span = std::max(span, fixed.back());
  if (10.0 * span > hi) {
    hi = 10.0 * span;
    ext = critical_points(g, hi);
    fixed = positive_fixed_points(g, hi);
  }
  if (fixed.empty()) throw Error(ErrorKind::NoPositiveFixedPoint, "no positive root of g(x) = x on (0, " + format_number(hi) + "]");
  if (fixed.size() > 1)
    throw Error(ErrorKind::HypothesisHViolated,
                std::to_string(fixed.size() + 1) + " fixed points found, first positive ones at " +
                    format_number(fixed[0]) + " and " + format_number(fixed[1]));
  r.kappa = fixed.front();
  r.gamma = g.slope(r.kappa);

  const bool unimodal = ext.maxima.size() == 1 && ext.minima.empty();
  if (!ext.maxima.empty()) r.x_M = ext.maxima.front();
  if (!unimodal) {
    if (ext.maxima.empty())
      r.notes.emplace_back("g has no interior maximum");
    else
      r.notes.emplace_back("g has " + std::to_string(ext.maxima.size()) + " maxima and " +
                           std::to_string(ext.minima.size()) + " minima");
  }

  // Permanence interval. zeta1 starts at min{g(g(x_M)), x_M, kappa}; if g
  // does not attain its minimum over [zeta1, zeta2] there, zeta1 moves down
  // the increasing branch to the preimage of that minimum.
  if (unimodal) {
    const double xm = *r.x_M;
    r.zeta2 = g(xm);
    double z1 = std::min({g(r.zeta2), xm, r.kappa});
    const double m = std::min(g(z1), g(r.zeta2));
    if (g(z1) > m + 1e-14 * (1.0 + m)) {
      z1 = detail::bisect([&](double x) { return g(x) - m; }, 0.0, z1);
    }
    r.zeta1 = z1;
  } else {
    r.zeta2 = grid_max(g, 0.0, hi);
    r.zeta1 = std::min(r.kappa, r.zeta2);
  }

  // Attractor of g on [zeta1, zeta2] by iterating the interval map.
  {
    double lo = r.zeta1, up = r.zeta2;
    for (int it = 0; it < 10000; ++it) {
      auto [nlo, nup] = unimodal ? interval_image(g, r.x_M, lo, up)
                                 : std::pair{grid_min(g, lo, up), grid_max(g, lo, up)};
      nlo = std::max(nlo, lo);
      nup = std::min(nup, up);
      const double moved = std::max(std::abs(nlo - lo), std::abs(nup - up));
      lo = nlo;
      up = nup;
      if (moved < 1e-10) break;
    }
    r.zeta_star = lo;
    r.zeta_star_upper = up;
  }

  // Schwarzian sign on [zeta1, zeta2] away from the critical point.
  if (g.derivative_order() >= 3 || g.kind() == BirthKind::UserTabulated) {
    bool negative = true;
    bool reliable = true;
    for (int i = 0; i <= kScanPoints && negative; ++i) {
      const double x = r.zeta1 + (r.zeta2 - r.zeta1) * i / kScanPoints;
      if (std::abs(g.slope(x)) < 1e-12) continue;
      try {
        const SchwarzianEstimate s = schwarzian_estimate(g, x);
        reliable = reliable && s.reliable;
        if (!(s.value < 0.0)) negative = false;
      } catch (const Error&) {
        // Stencil too close to 0 or to x_M: nothing to check there.
      }
    }
    r.schwarzian_negative = negative;
    r.schwarzian_reliable = reliable;
  } else {
    r.schwarzian_negative = false;
    r.notes.emplace_back("Schwarzian needs third derivatives; unavailable for " + g.spec());
  }

  // Hypothesis H.
  {
    bool ok = unimodal;
    if (unimodal) {
      const double xm = *r.x_M;
      const double bound = std::min({g(g(xm)), xm, r.kappa});
      if (r.zeta1 > bound + 1e-12) {
        ok = false;
        r.notes.emplace_back("zeta1 exceeds min{g(g(x_M)), x_M, kappa}");
      }
      if (g(r.zeta1) > grid_min(g, r.zeta1, r.zeta2) + 1e-12) {
        ok = false;
        r.notes.emplace_back("g(zeta1) is not the minimum of g over [zeta1, zeta2]");
      }
    }
    if (g.derivative_order() < 3) {
      ok = false;
      r.notes.emplace_back("g is not C^3");
    }
    if (!r.schwarzian_negative) {
      ok = false;
      r.notes.emplace_back("Sg is not negative on [zeta1, zeta2]");
    }
    r.hypotheses.H = ok;
  }

  // Hypothesis L: g(x) = g'(0) x on a right neighbourhood of 0 and g(x) <= g'(0) x.
  {
    bool linear = true;
    for (int i = 1; i <= 20 && linear; ++i) {
      const double x = 1e-3 * i / 20.0;
      linear = std::abs(g(x) - r.a0_plus * x) <= 1e-12 * r.a0_plus * x;
    }
    bool below = true;
    for (int i = 1; i <= kScanPoints && below; ++i) {
      const double x = hi * i / kScanPoints;
      below = g(x) <= r.a0_plus * x * (1.0 + 1e-14);
    }
    r.hypotheses.L = linear && below;
  }

  // Hypothesis B.
  {
    bool ok = r.zeta1 > 0.0 && r.zeta1 < r.zeta2;
    if (ok) {
      const double mn = grid_min(g, r.zeta1, r.zeta2);
      const double mx = grid_max(g, r.zeta1, r.zeta2);
      const double tol = 1e-12 * (1.0 + r.zeta2);
      ok = mn >= r.zeta1 - tol && mx <= r.zeta2 + tol && grid_max(g, 0.0, r.zeta1) <= r.zeta2 + tol &&
           g(r.zeta1) <= mn + tol;
      const double upto = std::min(r.zeta1, r.kappa);
      for (int i = 1; i < kScanPoints && ok; ++i) {
        const double x = upto * i / kScanPoints;
        ok = g(x) > x;
      }
    }
    r.hypotheses.B = ok;
  }
  return r;
}

}  // namespace wavefront
