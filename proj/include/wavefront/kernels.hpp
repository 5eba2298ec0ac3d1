#pragma once

// Data-parallel building blocks of the profile operator and the PDE
// right-hand side. Each kernel has a serial reference path and an OpenMP
// path; both produce the same values up to rounding.

#include <array>
#include <span>

#include "wavefront/birthfn.hpp"

namespace wavefront {

enum class Exec { Serial, Parallel };

/// M_n(x) = int_0^1 u^n e^{x u} du for n = 0..3.
std::array<double, 4> exp_moments(double x);

/// Weights of the exact integral of a cubic Lagrange interpolant against
/// the Green kernels on one mesh cell [t_j, t_j + dt]:
///   left  int e^{lambda (t_{j+1} - s)} G(s) ds,
///   right int e^{mu (t_j - s)} G(s) ds.
/// Stencil 0 uses nodes j..j+3 (first cell), 1 uses j-1..j+2 (interior),
/// 2 uses j-2..j+1 (last cell).
struct GreenWeights {
  std::array<std::array<double, 4>, 3> left{};
  std::array<std::array<double, 4>, 3> right{};
  double decay_left = 0.0;   // e^{lambda dt}
  double decay_right = 0.0;  // e^{-mu dt}
};

GreenWeights green_weights(double lambda, double mu, double dt);

/// Given forcing G on nodes 0..n-1 (n >= 4), fills out[i] for i < out.size()
/// with L_i + R_i where
///   L_0 = left_tail,  L_{i+1} = e^{lambda dt} L_i + (left cell integral i),
///   R_{n-1} = right_tail, R_i = e^{-mu dt} R_{i+1} + (right cell integral i).
/// `blocks` sets the number of scan blocks of the parallel path (0 = one per
/// thread).
void green_sweep(std::span<const double> G, const GreenWeights& w, double left_tail, double right_tail,
                 std::span<double> out, Exec exec, int blocks = 0);

/// out_i = (u_{i-1} - 2 u_i + u_{i+1})/dx^2 - u_i + g(u_delayed_i) with
/// reflecting (Neumann) ghost nodes; g sees max(u_delayed, 0).
void pde_rhs(std::span<const double> u, std::span<const double> u_delayed, double dx, const BirthFunction& g,
             std::span<double> out, Exec exec);

}  // namespace wavefront
