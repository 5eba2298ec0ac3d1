#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace wavefront {

using cplx = std::complex<double>;

/// Parameters of psi(z, eps) = eps z^2 - z - 1 + a exp(-z h), eps = 1/c^2.
struct CharParams {
  double a;
  double h;
  double epsilon;
};

/// Roots lambda < 0 < mu of eps z^2 - z - 1 = 0.
struct QuadRoots {
  double lambda_neg;
  double mu_pos;
};

QuadRoots quad_roots(double epsilon);

cplx psi(cplx z, const CharParams& p);
cplx psi_prime(cplx z, const CharParams& p);
double psi(double z, const CharParams& p);
double psi_prime(double z, const CharParams& p);

/// The two positive real roots 0 < lambda1 <= lambda2 of psi for a > 1 and
/// eps <= eps0. At the fold both equal z0 and `at_fold` is set.
struct RealRootPair {
  double lambda1;
  double lambda2;
  bool at_fold = false;
};

/// nullopt when eps lies above the fold (psi > 0 on the whole real line).
/// Throws WrongRegime for a <= 1.
std::optional<RealRootPair> real_root_pair(const CharParams& p);

/// Fold point of psi: the real double root z0 and the critical eps0, with
/// c_star = 1/sqrt(eps0) the minimal wave speed.
struct MinimalSpeed {
  double z0;
  double epsilon0;
  double c_star;
};

/// Solves a exp(-z h) = (2 + z)/(2 + h z) for z0 > 0 and then
/// eps0 = (h z0 + h + 1)/(h z0^2 + 2 z0). h = 0 returns kpp_limit(a).
MinimalSpeed minimal_speed(double a, double h);

/// Undelayed limit: eps0 = 1/(4(a-1)), c_star = 2 sqrt(a-1).
MinimalSpeed kpp_limit(double a);

/// Right-hand side F(h, eps) of the ODE eps0'(h) = F(h, eps0(h)).
double epsilon0_slope(double h, double epsilon);

struct Epsilon0Point {
  double h;
  double epsilon0;
  double c_star;
};

/// Integrates eps0' = F(h, eps0) from the anchor eps0(1) = 1/ln a with an
/// adaptive Dormand-Prince 5(4) stepper, both directions. Every value is
/// checked against an independent minimal_speed solve (relative 1e-6).
std::vector<Epsilon0Point> epsilon0_curve(double a, std::span<const double> h_grid);

struct RootCount {
  int n_right = 0;
  bool has_imaginary_axis_root = false;
  std::optional<cplx> dominant;
};

/// Contour radius 2(1 + (1 + |a|)/eps): outside it eps z^2 dominates psi
/// on the closed right half-plane.
double contour_radius(const CharParams& p);

/// Number of zeros of psi with Re z > 0 (with multiplicity), by the
/// argument principle on the half-disk {Re z >= 0, |z| <= R}. Imaginary-axis
/// roots are indented around and flagged. With `locate` the right-half-plane
/// roots are also located and the one of largest real part reported.
/// Throws ContourDegeneracy when a root sits on the contour.
RootCount count_right_halfplane(const CharParams& p, bool locate = false);

/// count_right_halfplane, retrying with eps nudged by 1e-9 (up to a few
/// times) when the contour is degenerate.
RootCount count_right_halfplane_robust(const CharParams& p, bool locate = false);

/// All zeros with Re z > 0, located by recursive rectangle subdivision with
/// winding-number counts and polished by Newton.
std::vector<cplx> right_halfplane_roots(const CharParams& p);

/// Pure imaginary roots i*omega with 0 <= omega <= omega_max (conjugates
/// implied). Residual of each returned root is below 1e-10.
std::vector<cplx> imaginary_axis_roots(const CharParams& p, double omega_max);

/// All real roots in (-inf, 0), ascending.
std::vector<double> negative_real_roots(const CharParams& p);

/// Smallest delay h > 0 at which psi(., eps) with slope a has a root i*omega
/// on the imaginary axis; nullopt when |a| <= 1 (no such crossing).
struct AxisCrossing {
  double omega;
  double h;
};
std::optional<AxisCrossing> first_axis_crossing(double a, double epsilon);

}  // namespace wavefront
