#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavefront/birthfn.hpp"
#include "wavefront/kernels.hpp"

namespace wavefront {

/// constant + amplitude * e^{rate * offset}, offset measured from the mesh edge.
struct ExpTail {
  double constant = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;

  double at(double offset) const;
};

/// Uniform-mesh function on [t0, t0 + (n-1) dt] with analytic tails:
/// left.at(t - t0) for t < t0 and right.at(t - t_end) for t > t_end.
struct MeshFunction {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;
  ExpTail left;
  ExpTail right;

  std::size_t size() const { return values.size(); }
  double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double t_end() const { return t(values.size() - 1); }
  /// Four-point Lagrange interpolation inside the mesh, tails outside.
  double operator()(double t) const;
};

/// phi-(t) = delta (e^{lambda1 t} - e^{lambda2 t}) for t <= 0 (else 0) and
/// phi+(t) = delta e^{lambda1 t}.
struct ConeBounds {
  double delta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  double lower(double t) const;
  double upper(double t) const;
};

/// Corner of a piecewise-linear cap; for other g the largest delta <= kappa/100
/// with |g(x) - g'(0) x| <= 0.05 g'(0) x on (0, delta].
double cone_delta(const BirthFunction& g, double kappa);

/// (A x)(t_i) = 1/(eps (mu - lambda)) [int_{-inf}^{t_i} e^{lambda (t_i - s)} G(s) ds
///                                   + int_{t_i}^{inf} e^{mu (t_i - s)} G(s) ds],
/// G(s) = g(x(s - h)), on every mesh node. The cubic interpolant of G is
/// integrated exactly against the kernels; G is linearised about the tail
/// constants beyond the mesh. Throws GridError unless h is a multiple of dt.
std::vector<double> apply_A(const MeshFunction& x, const BirthFunction& g, double h, double epsilon,
                            Exec exec = Exec::Serial);

/// The same operator with the linear forcing g(x) = slope * x.
std::vector<double> apply_L(const MeshFunction& x, double slope, double h, double epsilon,
                            Exec exec = Exec::Serial);

struct SolverConfig {
  double tol = 1e-8;
  int max_iters = 10000;
  double dt = 0.0;  // 0: min(h/20, 0.05), shrunk so that h is a whole number of steps
  Exec exec = Exec::Serial;
};

struct WaveProfile {
  double c = 0.0;
  double h = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;  // roots of eps z^2 - z - 1
  double mu = 0.0;
  double lambda1 = 0.0;  // positive real roots of psi at a = g'(0+)
  double lambda2 = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double delta = 0.0;
  MeshFunction x;
  double residual_sup = 0.0;        // recomputed on the half-step mesh
  double iteration_residual = 0.0;  // last residual of the iteration itself
  int iterations = 0;
  bool converged = false;
  double omega = 1.0;               // final relaxation factor
  std::vector<std::string> warnings;
};

/// Damped fixed-point iteration x <- (1 - w) x + w A x started from
/// min(phi+, kappa). The left-tail amplitude stays pinned at kappa/2, which
/// fixes the translation; afterwards the mesh is shifted so that x(0) = kappa/2.
/// Throws SpeedBelowMinimal for c <= c_star and DivergedOutOfCone when an
/// iterate leaves [0, 1.1 zeta2].
WaveProfile solve_profile(const BirthFunction& g, double h, double c, const SolverConfig& cfg = {});

struct AsymptoticsReport {
  double fitted_rate = 0.0;
  double target_rate = 0.0;  // lambda1 or lambda2, whichever is closer
  int target_index = 1;
  double relative_gap = 0.0;
  double r_squared = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  bool passed = false;
};

/// Least-squares slope of log x against t over the leftmost decade of the
/// samples with 1e-300 < x < threshold. Throws InsufficientTail when fewer
/// than 8 samples qualify.
AsymptoticsReport fit_tail_rate(std::span<const double> t, std::span<const double> x, double threshold,
                                double lambda1, double lambda2);

/// fit_tail_rate on the mesh with threshold delta/10; passes within 1%.
AsymptoticsReport check_asymptotics(const WaveProfile& w);

enum class TailClass { MonotoneApproach, OscillatoryAboutKappa, Undetermined };

std::string_view to_string(TailClass c);

struct TailReport {
  TailClass predicted = TailClass::Undetermined;
  TailClass observed = TailClass::MonotoneApproach;
  int crossings = 0;
  bool consistent = true;  // false only if oscillation was predicted but not seen
};

/// Sign changes of values - level, ignoring samples within `noise` of it.
int count_crossings(std::span<const double> values, double level, double noise);

/// Prediction from psi with a = g'(kappa): no roots on (-inf, 0) or the
/// imaginary axis implies oscillation about kappa. Observation: crossings
/// of kappa on the trailing half of the mesh (two or more means oscillatory).
TailReport classify_tail(const WaveProfile& w, const BirthFunction& g, double h);

/// Interior local extrema of the interpolated profile, ascending in t.
std::vector<double> profile_extrema(const MeshFunction& x);

/// |x(b) - xi(b - a) [x(a) + 1/(eps (mu - lambda)) int_a^b (e^{lambda (a-u)} -
/// e^{mu (a-u)}) g(x(u - h)) du]| for an extremum b of x. Throws
/// NotAnExtremum if |x'(b)| >= 1e-4.
double voc_identity_check(const WaveProfile& w, const BirthFunction& g, double h, double a, double b);

struct ProfileInvariants {
  double min_value = 0.0;
  double max_value = 0.0;
  double trailing_min = 0.0;  // over the last third of the mesh
  double trailing_max = 0.0;
  double max_slope = 0.0;
  double slope_bound = 0.0;  // max g / (eps (mu - lambda))
  bool nonnegative = false;
  bool bounded = false;      // max <= zeta2 + tol
  bool permanent = false;    // trailing third inside [zeta1 - tol, zeta2 + tol]
  bool slope_ok = false;
};

ProfileInvariants profile_invariants(const WaveProfile& w, const BirthFunction& g);

}  // namespace wavefront
