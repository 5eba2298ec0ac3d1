#pragma once

#include <optional>
#include <string_view>

#include "wavefront/birthfn.hpp"

namespace wavefront {

enum class UpperKind { Infinite, Finite, Empty };

std::string_view to_string(UpperKind kind);

/// Admissible speeds [c_star, upper] of positive wavefronts.
struct SpeedInterval {
  double c_star = 0.0;
  UpperKind upper = UpperKind::Infinite;
  double upper_value = 0.0;  // meaningful only for Finite
  double gamma = 0.0;
  double threshold = 0.0;    // (gamma^2 + gamma)/(gamma^2 + 1)
  double xi_at_c_star = 0.0;
};

/// Kernel mass xi(h, c) = (mu - lambda)/(mu e^{-lambda h} - lambda e^{-mu h})
/// with lambda < 0 < mu the roots of z^2/c^2 - z - 1. Lies in [e^{-h}, 1).
double xi(double h, double c);

/// Threshold (gamma^2 + gamma)/(gamma^2 + 1) that xi must reach.
double xi_threshold(double gamma);

/// Lower end from the fold at a0_plus, upper end from xi(h, c) = threshold.
/// Throws WrongRegime when a0_plus <= 1.
SpeedInterval speed_interval(const StructureReport& report, double h);
SpeedInterval speed_interval(double a0_plus, double gamma, double h);

/// Supremum of the speeds c for which psi(., 1/c^2) with slope gamma < 0 has
/// exactly one root in Re z > 0. nullopt means the count stays at one for
/// every probed c up to 1e3.
std::optional<double> c_opt_upper(double gamma, double h);

}  // namespace wavefront
