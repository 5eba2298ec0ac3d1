#include "wavefront/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wavefront/error.hpp"

namespace wavefront {

std::array<double, 4> exp_moments(double x) {
  std::array<double, 4> m{};
  if (std::abs(x) < 1.0) {
    // Series sum_k x^k / (k! (n + k + 1)); the forward recurrence cancels here.
    for (int n = 0; n < 4; ++n) {
      double term = 1.0, sum = 0.0;
      for (int k = 0; k < 40; ++k) {
        if (k > 0) term *= x / k;
        const double add = term / (n + k + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      }
      m[n] = sum;
    }
    return m;
  }
  const double ex = std::exp(x);
  m[0] = std::expm1(x) / x;
  for (int n = 1; n < 4; ++n) m[n] = (ex - n * m[n - 1]) / x;
  return m;
}

namespace {

// Monomial coefficients of the Lagrange basis on the given abscissae.
std::array<std::array<double, 4>, 4> lagrange_coefficients(const std::array<double, 4>& nodes) {
  std::array<std::array<double, 4>, 4> out{};
  for (int k = 0; k < 4; ++k) {
    std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};
    double denom = 1.0;
    int deg = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      // poly *= (u - nodes[j])
      for (int d = deg + 1; d > 0; --d) poly[d] = poly[d - 1] - nodes[j] * poly[d];
      poly[0] *= -nodes[j];
      ++deg;
      denom *= nodes[k] - nodes[j];
    }
    for (int d = 0; d < 4; ++d) out[k][d] = poly[d] / denom;
  }
  return out;
}

constexpr std::array<std::array<double, 4>, 3> kStencils{{{0, 1, 2, 3}, {-1, 0, 1, 2}, {-2, -1, 0, 1}}};
constexpr std::array<int, 3> kOffset{0, -1, -2};

}  // namespace

GreenWeights green_weights(double lambda, double mu, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::GridError, "mesh step must be positive");
  GreenWeights w;
  w.decay_left = std::exp(lambda * dt);
  w.decay_right = std::exp(-mu * dt);
  // left kernel on u in [0,1]: e^{lambda dt (1 - u)} = e^{lambda dt} e^{-lambda dt u}
  const auto ml = exp_moments(-lambda * dt);
  const auto mr = exp_moments(-mu * dt);
  for (int s = 0; s < 3; ++s) {
    const auto coef = lagrange_coefficients(kStencils[s]);
    for (int k = 0; k < 4; ++k) {
      double l = 0.0, r = 0.0;
      for (int d = 0; d < 4; ++d) {
        l += coef[k][d] * ml[d];
        r += coef[k][d] * mr[d];
      }
      w.left[s][k] = dt * w.decay_left * l;
      w.right[s][k] = dt * r;
    }
  }
  return w;
}

namespace {

inline int stencil_of(std::size_t j, std::size_t cells) { return j == 0 ? 0 : (j + 1 == cells ? 2 : 1); }

inline double cell(std::span<const double> G, const std::array<std::array<double, 4>, 3>& wt, std::size_t j,
                   std::size_t cells) {
  const int s = stencil_of(j, cells);
  const double* g = G.data() + j + kOffset[s];
  return wt[s][0] * g[0] + wt[s][1] * g[1] + wt[s][2] * g[2] + wt[s][3] * g[3];
}

// y[0] = y0, y[i+1] = d y[i] + b[i]; y has b.size() + 1 entries.
void scan_serial(std::span<const double> b, double d, double y0, std::span<double> y) {
  y[0] = y0;
  for (std::size_t i = 0; i < b.size(); ++i) y[i + 1] = d * y[i] + b[i];
}

void scan_blocked(std::span<const double> b, double d, double y0, std::span<double> y, int blocks) {
  const std::size_t n = b.size();
  const std::size_t nb = std::max<std::size_t>(1, std::min<std::size_t>(blocks, n));
  std::vector<std::size_t> start(nb + 1);
  for (std::size_t k = 0; k <= nb; ++k) start[k] = n * k / nb;

  // Pass 1: each block runs the recursion from zero.
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < nb; ++k) {
    double acc = 0.0;
    for (std::size_t i = start[k]; i < start[k + 1]; ++i) {
      acc = d * acc + b[i];
      y[i + 1] = acc;
    }
  }
  // Pass 2: carry the block entry values forward.
  std::vector<double> entry(nb);
  entry[0] = y0;
  for (std::size_t k = 1; k < nb; ++k) {
    const std::size_t len = start[k] - start[k - 1];
    entry[k] = std::pow(d, static_cast<double>(len)) * entry[k - 1] + y[start[k]];
  }
  // Pass 3: add the propagated entry value inside each block.
  y[0] = y0;
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < nb; ++k) {
    double carry = entry[k];
    for (std::size_t i = start[k]; i < start[k + 1]; ++i) {
      carry *= d;
      // Stop before the carry turns subnormal; the rest adds nothing.
      if (std::abs(carry) < std::numeric_limits<double>::min()) break;
      y[i + 1] += carry;
    }
  }
}

}  // namespace

void green_sweep(std::span<const double> G, const GreenWeights& w, double left_tail, double right_tail,
                 std::span<double> out, Exec exec, int blocks) {
  const std::size_t n = G.size();
  if (n < 4) throw Error(ErrorKind::GridError, "forcing grid needs at least 4 nodes");
  if (out.size() > n) throw Error(ErrorKind::GridError, "output longer than forcing grid");
  const std::size_t cells = n - 1;

  std::vector<double> bl(cells), br(cells), L(n), R(n);
  if (exec == Exec::Serial) {
    for (std::size_t j = 0; j < cells; ++j) {
      bl[j] = cell(G, w.left, j, cells);
      br[cells - 1 - j] = cell(G, w.right, j, cells);
    }
    scan_serial(bl, w.decay_left, left_tail, L);
    scan_serial(br, w.decay_right, right_tail, R);
  } else {
    const long long nc = static_cast<long long>(cells);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < nc; ++j) {
      bl[j] = cell(G, w.left, j, cells);
      br[cells - 1 - j] = cell(G, w.right, j, cells);
    }
    const int nb = blocks > 0 ? blocks : omp_get_max_threads();
    scan_blocked(bl, w.decay_left, left_tail, L, nb);
    scan_blocked(br, w.decay_right, right_tail, R, nb);
  }
  // R was built from the right end; index n-1-i holds R_i.
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = L[i] + R[n - 1 - i];
}

void pde_rhs(std::span<const double> u, std::span<const double> u_delayed, double dx, const BirthFunction& g,
             std::span<double> out, Exec exec) {
  const std::size_t n = u.size();
  if (n < 2 || u_delayed.size() != n || out.size() != n) throw Error(ErrorKind::GridError, "pde_rhs size mismatch");
  const double inv = 1.0 / (dx * dx);
  auto at = [&](std::size_t i) {
    const double left = i == 0 ? u[1] : u[i - 1];
    const double right = i + 1 == n ? u[n - 2] : u[i + 1];
    return (left - 2.0 * u[i] + right) * inv - u[i] + g(std::max(u_delayed[i], 0.0));
  };
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  } else {
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < nn; ++i) out[i] = at(i);
  }
}

}  // namespace wavefront
