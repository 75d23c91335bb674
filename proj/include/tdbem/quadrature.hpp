#pragma once

#include <vector>

#include "tdbem/geometry.hpp"

namespace tdbem {

struct QuadPoint2D {
  double a, b;  // barycentric coordinates (third is 1-a-b)
  double w;     // weight w.r.t. reference area 1
};

/// Symmetric Gauss rules on the triangle, selected by polynomial degree
/// (1, 2, 3, 4 or 5). Weights sum to 1.
const std::vector<QuadPoint2D>& triangle_rule(int degree);

struct GaussRule1D {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;  // weights summing to 1
};

/// Gauss-Legendre on [0,1], n = 1..16 points.
const GaussRule1D& gauss_rule(int n);

}  // namespace tdbem
