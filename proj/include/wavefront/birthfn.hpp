#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavefront {

enum class BirthKind { Nicholson, MackeyGlass, PiecewiseLinearCap, UserTabulated };

std::string_view to_string(BirthKind kind);

/// Birth nonlinearity g of u_t = u_xx - u + g(u(t-h, x)).
///
/// Built-ins carry hand-coded derivatives up to order 3:
///   nicholson      g(u) = p u e^{-u}
///   mackey-glass   g(u) = p u / (1 + u^n)
///   pwl-cap        g(u) = p min(u, delta)   (locally linear near 0, order 1)
/// Tabulated functions are monotone-cubic (PCHIP) interpolants of a table
/// starting at (0, 0), held constant past the last node.
///
/// Values are immutable after construction.
class BirthFunction {
 public:
  static BirthFunction nicholson(double p);
  static BirthFunction mackey_glass(double p, double n);
  static BirthFunction piecewise_linear_cap(double slope, double corner);
  static BirthFunction tabulated(std::vector<double> x, std::vector<double> y);

  /// Parses `name:key=val,key=val`, e.g. `nicholson:p=7.389056` or
  /// `mackey-glass:p=2,n=2` or `pwl-cap:p=2,delta=0.1` or
  /// `tabulated:file=table.csv` (two columns x,g with a header row).
  static BirthFunction parse(std::string_view spec);

  BirthKind kind() const { return kind_; }
  std::span<const double> params() const { return params_; }
  int derivative_order() const;

  /// d^order g / dx^order at x >= 0.
  double eval(double x, int order = 0) const;
  double operator()(double x) const { return eval(x, 0); }

  /// First derivative for every kind; for tabulated functions this is the
  /// derivative of the interpolant (eval(x, 1) refuses those).
  double slope(double x) const;

  /// g'_+(0+) = limsup g(x)/x as x -> 0+.
  double slope_at_zero() const;

  /// Interpolation nodes of a tabulated function (empty for built-ins).
  std::span<const double> table_nodes() const { return tx_; }

  /// Canonical spec string; parse(spec()) reproduces the function.
  std::string spec() const;

 private:
  BirthFunction(BirthKind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}

  double eval_tabulated(double x, int order) const;

  BirthKind kind_;
  std::vector<double> params_;
  // Tabulated data: nodes, values and PCHIP node slopes.
  std::vector<double> tx_, ty_, td_;
  std::string source_;
};

/// (Sg)(x) = g'''/g' - 3/2 (g''/g')^2 from the analytic derivatives.
double schwarzian(const BirthFunction& g, double x);

struct SchwarzianEstimate {
  double value;
  bool reliable;
};

/// Analytic Schwarzian where available, otherwise 5-point finite
/// differences of the interpolant. `reliable` is false when the stencil
/// straddles a table node (the interpolant is only C^1 there).
SchwarzianEstimate schwarzian_estimate(const BirthFunction& g, double x);

struct Hypotheses {
  bool H = false;
  bool L = false;
  bool B = false;

  std::vector<std::string> labels() const;
};

struct StructureReport {
  double kappa = 0.0;
  std::optional<double> x_M;
  double a0_minus = 0.0;
  double a0_plus = 0.0;
  double gamma = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta_star = 0.0;        // lower end of the g-attractor in [zeta1, zeta2]
  double zeta_star_upper = 0.0;  // upper end
  bool schwarzian_negative = false;
  bool schwarzian_reliable = true;
  Hypotheses hypotheses;
  std::vector<std::string> notes;  // why a hypothesis failed
};

/// Locates kappa and x_M, builds the permanence interval [zeta1, zeta2] and
/// its attractor, and checks hypotheses H, L and B.
StructureReport analyze_structure(const BirthFunction& g);

/// Image of [lo, hi] under g, exact for unimodal g with maximum at x_M.
std::pair<double, double> interval_image(const BirthFunction& g, std::optional<double> x_M, double lo,
                                         double hi);

}  // namespace wavefront
