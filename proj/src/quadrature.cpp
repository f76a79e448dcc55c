#include "wdirac/quadrature.hpp"

#include <cmath>

namespace wdirac {

// Nodes by Newton iteration on P_n; standard and accurate to machine
// precision for the orders used here.
QuadRule gauss_legendre(int npoints) {
  require(npoints >= 1 && npoints <= 64, "gauss_legendre: npoints out of range");
  const int n = npoints;
  QuadRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.points[i] = {0.5 * (1.0 - x), 0.0, 0.0};  // map [-1,1] -> [0,1]
    rule.points[n - 1 - i] = {0.5 * (1.0 + x), 0.0, 0.0};
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadRule simplex_rule(int k, int order) {
  require(k >= 0 && k <= 3, "simplex_rule: dimension out of range");
  require(order >= 0, "simplex_rule: negative order");
  QuadRule rule;
  if (k == 0) {
    rule.points.push_back({0.0, 0.0, 0.0});
    rule.weights.push_back(1.0);
    return rule;
  }
  const int q = order / 2 + 2;
  const QuadRule g = gauss_legendre(q);
  if (k == 1) return g;
  if (k == 2) {
    // Duffy collapse t1 = u, t2 = v (1 - u); Jacobian (1 - u).
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double u = g.points[i][0], v = g.points[j][0];
        rule.points.push_back({u, v * (1.0 - u), 0.0});
        rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
      }
    return rule;
  }
  // t1 = u, t2 = v (1 - u), t3 = w (1 - u)(1 - v); Jacobian (1 - u)^2 (1 - v).
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int l = 0; l < q; ++l) {
        const double u = g.points[i][0], v = g.points[j][0], w = g.points[l][0];
        rule.points.push_back({u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)});
        rule.weights.push_back(g.weights[i] * g.weights[j] * g.weights[l] * (1.0 - u) *
                               (1.0 - u) * (1.0 - v));
      }
  return rule;
}

QuadRule disc_rule(int order) {
  require(order >= 1, "disc_rule: order out of range");
  const int q = order + 1;
  const int m = 2 * order + 4;
  const QuadRule g = gauss_legendre(q);
  QuadRule rule;
  for (int i = 0; i < q; ++i) {
    const double r = g.points[i][0];
    const double wr = g.weights[i] * r * (2.0 * M_PI / m);
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / m;
      rule.points.push_back({r * std::cos(th), r * std::sin(th), 0.0});
      rule.weights.push_back(wr);
    }
  }
  return rule;
}

}  // namespace wdirac
