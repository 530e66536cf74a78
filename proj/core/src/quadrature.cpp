#include "hibox/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hibox {

GaussRule gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m < 1");
  // Legendre P_m and its derivative at x
  auto legendre = [m](double x, double& deriv) {
    double p0 = 1.0;
    double p1 = x;
    for (int n = 2; n <= m; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    deriv = m * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  GaussRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int k = 0; k < m; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    // x decreases with k, so fill from the back to get increasing nodes
    r.nodes[m - 1 - k] = 0.5 * (1.0 + x);
    r.weights[m - 1 - k] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const TriangleRule& triangle_rule_degree8() {
  static const TriangleRule rule = [] {
    TriangleRule t;
    t.degree = 8;
    auto add3 = [&](double a, double w) {
      const double b = 1.0 - 2.0 * a;
      t.bary.push_back({a, a, b});
      t.bary.push_back({a, b, a});
      t.bary.push_back({b, a, a});
      for (int k = 0; k < 3; ++k) t.weights.push_back(w);
    };
    t.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    t.weights.push_back(0.144315607677787);
    add3(0.459292588292723, 0.095091634267285);
    add3(0.170569307751760, 0.103217370534718);
    add3(0.050547228317031, 0.032458497623198);
    const double a = 0.263112829634638;
    const double b = 0.728492392955404;
    const double c = 1.0 - a - b;
    const std::array<std::array<double, 3>, 6> perms = {
        {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
    for (const auto& p : perms) {
      t.bary.push_back(p);
      t.weights.push_back(0.027230314174435);
    }
    return t;
  }();
  return rule;
}

}  // namespace hibox
