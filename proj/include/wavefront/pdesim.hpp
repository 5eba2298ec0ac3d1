#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wavefront/birthfn.hpp"
#include "wavefront/kernels.hpp"

namespace wavefront {

struct InitialData {
  enum class Kind { Bump, Step } kind = Kind::Step;
  double width = 0.0;   // Bump: support [0, width]
  double height = 0.0;
};

/// u_t = u_xx - u + g(u(t - h, x)) on [0, L] with Neumann ends.
struct SimConfig {
  double length = 600.0;
  int nx = 2048;
  double dt = 0.03;
  double t_end = 240.0;
  double h = 0.0;
  BirthFunction g = BirthFunction::nicholson(2.0);
  InitialData initial{InitialData::Kind::Step, 0.0, 1.0};
  std::optional<double> level;  // front level; default kappa/2
  double track_interval = 0.5;  // time between recorded front positions
  Exec exec = Exec::Serial;

  // Optional snapshots every `frame_interval` time units.
  double frame_interval = 0.0;
  std::function<void(double t, std::span<const double> u)> on_frame;
};

struct SimResult {
  std::vector<std::pair<double, double>> front_positions;  // (t, x_front)
  std::optional<double> speed_estimate;
  double r_squared = 0.0;
  bool mass_nonneg = true;
  double min_u = 0.0;
  double max_u = 0.0;
  long steps = 0;
  double level = 0.0;
};

/// Initial profile on the grid x_i = i L/(nx - 1). A step fills x <= 0.05 L;
/// a bump is height cos^2(pi x / (2 width)) on [0, width].
std::vector<double> initial_profile(const SimConfig& cfg);

/// Classical RK4 method of lines. History on [-h, 0] is held at the initial
/// data; the delayed state at half steps is the mean of two stored levels.
/// The rightmost crossing of `level` is tracked and the speed is the
/// least-squares slope over the later half of the positions inside
/// [0.1 L, 0.9 L].
/// Throws NumericalBlowup on non-finite values, DomainTooSmall when the front
/// reaches 0.9 L before t_end/2, and GridError when the time step violates
/// dt <= 0.4 dx^2 or does not divide h.
SimResult simulate(const SimConfig& cfg);

}  // namespace wavefront
