#include "tdbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace tdbem {

const std::vector<QuadPoint2D>& triangle_rule(int degree) {
  static const std::vector<QuadPoint2D> d1 = {{1.0 / 3, 1.0 / 3, 1.0}};
  static const std::vector<QuadPoint2D> d2 = {
      {2.0 / 3, 1.0 / 6, 1.0 / 3}, {1.0 / 6, 2.0 / 3, 1.0 / 3}, {1.0 / 6, 1.0 / 6, 1.0 / 3}};
  // Strang-Fix degree-4, 6 points
  static const std::vector<QuadPoint2D> d4 = {
      {0.816847572980459, 0.091576213509771, 0.109951743655322},
      {0.091576213509771, 0.816847572980459, 0.109951743655322},
      {0.091576213509771, 0.091576213509771, 0.109951743655322},
      {0.108103018168070, 0.445948490915965, 0.223381589678011},
      {0.445948490915965, 0.108103018168070, 0.223381589678011},
      {0.445948490915965, 0.445948490915965, 0.223381589678011}};
  // degree-5, 7 points
  static const std::vector<QuadPoint2D> d5 = {
      {1.0 / 3, 1.0 / 3, 0.225},
      {0.797426985353087, 0.101286507323456, 0.125939180544827},
      {0.101286507323456, 0.797426985353087, 0.125939180544827},
      {0.101286507323456, 0.101286507323456, 0.125939180544827},
      {0.059715871789770, 0.470142064105115, 0.132394152788506},
      {0.470142064105115, 0.059715871789770, 0.132394152788506},
      {0.470142064105115, 0.470142064105115, 0.132394152788506}};
  if (degree <= 1) return d1;
  if (degree <= 2) return d2;
  if (degree <= 4) return d4;
  return d5;
}

namespace {
GaussRule1D make_gauss(int n) {
  // Newton iteration on Legendre polynomials, nodes mapped to [0,1].
  GaussRule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[n - 1 - i] = 0.5 * (1.0 + x);
    r.w[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}
}  // namespace

const GaussRule1D& gauss_rule(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("gauss_rule: n out of range");
  static std::map<int, GaussRule1D> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

}  // namespace tdbem
