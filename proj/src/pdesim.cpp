#include "wavefront/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "wavefront/error.hpp"

namespace wavefront {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Linear interpolation of the rightmost downward crossing of `level`.
std::optional<double> rightmost_crossing(std::span<const double> u, double dx, double level) {
  for (std::size_t i = u.size() - 1; i-- > 0;) {
    if (u[i] >= level && u[i + 1] < level) return dx * (static_cast<double>(i) + (u[i] - level) / (u[i] - u[i + 1]));
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> initial_profile(const SimConfig& cfg) {
  const double dx = cfg.length / (cfg.nx - 1);
  std::vector<double> u(cfg.nx, 0.0);
  for (int i = 0; i < cfg.nx; ++i) {
    const double x = dx * i;
    if (cfg.initial.kind == InitialData::Kind::Step) {
      if (x <= 0.05 * cfg.length) u[i] = cfg.initial.height;
    } else if (x < cfg.initial.width) {
      const double c = std::cos(std::numbers::pi * x / (2.0 * cfg.initial.width));
      u[i] = cfg.initial.height * c * c;
    }
  }
  return u;
}

SimResult simulate(const SimConfig& cfg) {
  if (!(cfg.length > 0.0) || cfg.nx < 3) throw Error(ErrorKind::GridError, "need L > 0 and nx >= 3");
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw Error(ErrorKind::GridError, "need dt > 0 and t_end > 0");
  if (!(cfg.h >= 0.0)) throw Error(ErrorKind::DomainError, "delay must be nonnegative");
  if (cfg.initial.kind == InitialData::Kind::Bump && !(cfg.initial.width > 0.0))
    throw Error(ErrorKind::DomainError, "bump width must be positive");
  if (!(cfg.initial.height >= 0.0)) throw Error(ErrorKind::DomainError, "initial height must be nonnegative");
  const double dx = cfg.length / (cfg.nx - 1);
  if (cfg.dt > 0.4 * dx * dx * (1.0 + 1e-12))
    throw Error(ErrorKind::GridError, "dt = " + num(cfg.dt) + " exceeds 0.4 dx^2 = " + num(0.4 * dx * dx));
  const double mr = cfg.h / cfg.dt;
  const auto m = static_cast<std::size_t>(std::llround(mr));
  if (std::abs(mr - static_cast<double>(m)) > 1e-9 * std::max(1.0, mr))
    throw Error(ErrorKind::GridError, "dt = " + num(cfg.dt) + " does not divide h = " + num(cfg.h));

  SimResult res;
  const double kappa = analyze_structure(cfg.g).kappa;
  res.level = cfg.level.value_or(0.5 * kappa);

  const std::size_t n = static_cast<std::size_t>(cfg.nx);
  std::vector<double> u = initial_profile(cfg);
  // history[k % (m + 1)] holds the state at step k; constant before step 0.
  std::vector<std::vector<double>> history(m + 1, u);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n), mid_delay(n);

  res.min_u = *std::min_element(u.begin(), u.end());
  res.max_u = *std::max_element(u.begin(), u.end());
  const auto steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  const long track_every = std::max(1L, std::lround(cfg.track_interval / cfg.dt));
  const long frame_every = cfg.frame_interval > 0.0 ? std::max(1L, std::lround(cfg.frame_interval / cfg.dt)) : 0;
  if (frame_every > 0 && cfg.on_frame) cfg.on_frame(0.0, u);

  for (long step = 0; step < steps; ++step) {
    if (m == 0) {
      pde_rhs(u, u, dx, cfg.g, k1, cfg.exec);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * cfg.dt * k1[i];
      pde_rhs(stage, stage, dx, cfg.g, k2, cfg.exec);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * cfg.dt * k2[i];
      pde_rhs(stage, stage, dx, cfg.g, k3, cfg.exec);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + cfg.dt * k3[i];
      pde_rhs(stage, stage, dx, cfg.g, k4, cfg.exec);
    } else {
      // Delayed states at t_n - h, t_n - h + dt/2 and t_n - h + dt.
      const auto& d0 = history[static_cast<std::size_t>(std::max(0L, step - static_cast<long>(m))) % (m + 1)];
      const auto& d1 = history[static_cast<std::size_t>(std::max(0L, step + 1 - static_cast<long>(m))) % (m + 1)];
      for (std::size_t i = 0; i < n; ++i) mid_delay[i] = 0.5 * (d0[i] + d1[i]);
      pde_rhs(u, d0, dx, cfg.g, k1, cfg.exec);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * cfg.dt * k1[i];
      pde_rhs(stage, mid_delay, dx, cfg.g, k2, cfg.exec);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * cfg.dt * k2[i];
      pde_rhs(stage, mid_delay, dx, cfg.g, k3, cfg.exec);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + cfg.dt * k3[i];
      pde_rhs(stage, d1, dx, cfg.g, k4, cfg.exec);
    }
    double lo = u[0], hi = u[0];
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += cfg.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(u[i]))
        throw Error(ErrorKind::NumericalBlowup, "non-finite value at step " + std::to_string(step + 1));
      lo = std::min(lo, u[i]);
      hi = std::max(hi, u[i]);
    }
    res.min_u = std::min(res.min_u, lo);
    res.max_u = std::max(res.max_u, hi);
    if (lo < -1e-12) res.mass_nonneg = false;
    if (m > 0) history[static_cast<std::size_t>(step + 1) % (m + 1)] = u;
    res.steps = step + 1;
    const double t = cfg.dt * static_cast<double>(step + 1);

    if ((step + 1) % track_every == 0) {
      if (auto xf = rightmost_crossing(u, dx, res.level)) {
        res.front_positions.emplace_back(t, *xf);
        if (*xf >= 0.9 * cfg.length && t < 0.5 * cfg.t_end)
          throw Error(ErrorKind::DomainTooSmall,
                      "front reached 0.9 L at t = " + num(t) + " before t_end/2 = " + num(0.5 * cfg.t_end));
      }
    }
    if (frame_every > 0 && cfg.on_frame && (step + 1) % frame_every == 0) cfg.on_frame(t, u);
  }

  std::vector<std::pair<double, double>> inside;
  for (const auto& p : res.front_positions)
    if (p.second >= 0.1 * cfg.length && p.second <= 0.9 * cfg.length) inside.push_back(p);
  const std::size_t half = inside.size() / 2;
  const std::size_t cnt = inside.size() - half;
  if (cnt >= 3) {
    double st = 0, sx = 0, stt = 0, stx = 0, sxx = 0;
    for (std::size_t i = half; i < inside.size(); ++i) {
      const auto [t, x] = inside[i];
      st += t;
      sx += x;
      stt += t * t;
      stx += t * x;
      sxx += x * x;
    }
    const double dn = static_cast<double>(cnt);
    const double vt = stt - st * st / dn, vx = sxx - sx * sx / dn, cov = stx - st * sx / dn;
    if (vt > 0.0) {
      res.speed_estimate = cov / vt;
      res.r_squared = vx > 0.0 ? cov * cov / (vt * vx) : 1.0;
    }
  }
  return res;
}

}  // namespace wavefront
