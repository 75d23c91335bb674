#pragma once

#include <cmath>
#include <stdexcept>

namespace tdbem {

/// Uniform decomposition of [0, T] with nodes t_n = n*dt.
struct TimeGrid {
  double dt = 0;
  int n_steps = 0;

  double horizon() const { return dt * n_steps; }
  double node(int n) const { return n * dt; }
};

inline TimeGrid build_time_grid(double T, double dt) {
  if (T <= 0 || dt <= 0) throw std::invalid_argument("build_time_grid: T and dt must be positive");
  int n = static_cast<int>(std::lround(T / dt));
  if (n == 0) throw std::invalid_argument("build_time_grid: horizon shorter than one step");
  return TimeGrid{dt, n};
}

/// Hat function centered at 0 with support [-dt, dt]: the piecewise linear
/// nodal basis is beta^m(t) = hat(t - m*dt).
inline double hat(double s, double dt) {
  double a = 1.0 - std::abs(s) / dt;
  return a > 0 ? a : 0.0;
}

/// d/ds hat(s); the jump points are measure zero under the radial quadrature.
inline double hat_deriv(double s, double dt) {
  if (s <= -dt || s >= dt || s == 0) return 0.0;
  return s < 0 ? 1.0 / dt : -1.0 / dt;
}

/// Primitive of hat: S(s) = integral of hat over (-inf, s].
inline double hat_primitive(double s, double dt) {
  if (s <= -dt) return 0.0;
  if (s <= 0) return (s + dt) * (s + dt) / (2.0 * dt);
  if (s <= dt) return dt - (dt - s) * (dt - s) / (2.0 * dt);
  return dt;
}

/// integral of beta^m(t) gamma^n(t) dt = (dt/2) [delta_{n,m} + delta_{n-1,m}].
inline double temporal_pairing(int m, int n, double dt) {
  return (m == n || m == n - 1) ? 0.5 * dt : 0.0;
}

}  // namespace tdbem
