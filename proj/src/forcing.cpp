#include <cmath>
#include <stdexcept>

#include "tdbem/analysis.hpp"

namespace tdbem {

double sphere_exact_u(double t) {
  if (t <= 0 || t >= 4) return 0.0;
  double a = 4.0 - t;
  return 0.75 - std::cos(0.5 * M_PI * a) + 0.25 * std::cos(M_PI * a);
}

double sphere_exact_h(double t) {
  if (t <= 0 || t >= 4) return 0.0;
  double a = 4.0 - t;
  return -0.75 + std::cos(0.5 * M_PI * a) + 0.5 * M_PI * std::sin(0.5 * M_PI * a) -
         0.25 * (std::cos(M_PI * a) + M_PI * std::sin(M_PI * a));
}

namespace {

inline double window(double v) { return std::abs(v) <= 0.25 ? 1.0 : 0.0; }

double screen_profile(double t, double x, double y, int tpow) {
  double amp = std::exp(-2.0 * t) * std::pow(t, tpow);
  return amp * std::cos(2.0 * M_PI * x) * std::cos(2.0 * M_PI * y) * window(x) * window(y);
}

// face-local coordinates: the two components orthogonal to the dominant
// axis, which are zero at the face midpoint
double cube_profile(double t, const Vec3& p, int tpow) {
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(p[k]) > std::abs(p[axis])) axis = k;
  double u = p[(axis + 1) % 3], v = p[(axis + 2) % 3];
  return screen_profile(t, u, v, tpow);
}

}  // namespace

double builtin_forcing(const std::string& name, double t, const Vec3& x) {
  if (name == "contact_screen" || name == "punch_screen") return screen_profile(t, x[0], x[1], 1);
  if (name == "contact_cube" || name == "punch_cube") return cube_profile(t, x, 4);
  if (name == "sphere_neumann") return sphere_exact_h(t);
  throw std::invalid_argument("unknown builtin forcing: " + name);
}

SpaceTimeForcing make_forcing(const std::string& name) {
  builtin_forcing(name, 0.0, {0, 0, 0});  // validate the name eagerly
  return [name](double t, const Vec3& x) { return builtin_forcing(name, t, x); };
}

}  // namespace tdbem
