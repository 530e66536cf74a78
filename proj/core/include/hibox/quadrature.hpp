#pragma once

#include <array>
#include <vector>

namespace hibox {

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// m-point Gauss-Legendre rule mapped to [0, 1].
GaussRule gauss_legendre(int m);

struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;  // sum to 1; multiply by the triangle area
  int degree = 0;
};

// Symmetric 16-point rule exact for total degree 8.
const TriangleRule& triangle_rule_degree8();

}  // namespace hibox
