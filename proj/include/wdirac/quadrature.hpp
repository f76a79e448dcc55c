#pragma once

#include <array>
#include <vector>

#include "wdirac/linalg.hpp"

namespace wdirac {

// Quadrature nodes in reference coordinates with weights that include the
// reference measure: simplex rules integrate over {t_i >= 0, sum t_i <= 1}
// (weights sum to 1/k!), the disc rule over the unit disc (weights sum to pi).
struct QuadRule {
  std::vector<std::array<double, 3>> points;
  Vector weights;
  std::size_t size() const { return weights.size(); }
};

// n-point Gauss-Legendre on [0, 1]; exact through degree 2n - 1.
QuadRule gauss_legendre(int npoints);

// Rule on the reference k-simplex (k = 0..3) exact at least through total
// degree `order`, built by collapsing a tensor Gauss grid.
QuadRule simplex_rule(int k, int order);

// Product rule on the unit disc: `order`+1 radial Gauss points against an
// equispaced angular grid.
QuadRule disc_rule(int order);

}  // namespace wdirac
