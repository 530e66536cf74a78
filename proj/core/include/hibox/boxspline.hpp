#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

#include "hibox/lattice.hpp"

namespace hibox {

using Rational = boost::rational<std::int64_t>;

struct RVec2 {
  Rational x;
  Rational y;
  bool operator==(const RVec2&) const = default;
};

// Columns of Ξ in lattice units.
class DirectionMatrix {
 public:
  explicit DirectionMatrix(std::vector<IVec2> columns);

  static DirectionMatrix three_directional_quartic();
  static DirectionMatrix two_directional_bicubic();

  const std::vector<IVec2>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  DirectionMatrix without_last() const;

 private:
  std::vector<IVec2> columns_;
};

struct BoxSplineDescriptor {
  DirectionMatrix directions;
  int degree = 0;
  int smoothness = 0;
  std::vector<IVec2> support;  // zonotope vertices, counter-clockwise
  Rational support_area;
  RVec2 anchor;
};

BoxSplineDescriptor analyze(const DirectionMatrix& directions);

// Every 2x2 minor in {-1, 0, 1}.
bool check_unimodular(const DirectionMatrix& directions);

// Reference value by repeated directional convolution.  Slow; intended for tests.
double evaluate_oracle(const DirectionMatrix& directions, double x, double y);
double evaluate_oracle(const BoxSplineDescriptor& d, double x, double y);

struct MaskEntry {
  IVec2 offset;
  Rational coef;
};

// Two-scale coefficients: M(x) = sum_k c_k M(2x - k).
std::vector<MaskEntry> subdivision_mask(const BoxSplineDescriptor& d);

// Value and derivatives up to second order.
struct Jet {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;

  Jet& operator+=(const Jet& o);
  Jet scaled(double s) const;
};

// The C2 quartic box spline on the three-directional mesh, evaluated from its Bezier net.
namespace quartic {

// Bezier ordinates times 24 on the quarter-unit domain-point grid, indexed [y][x].
const std::array<std::array<int, 17>, 17>& bezier_grid24();

// The 24 level-0 cells of the support of the unshifted generator.
const std::vector<Cell>& support_cells();

// Bernstein coefficients times 24 on a support cell; index order i = 4..0, j = 4-i..0, k = 4-i-j,
// where (i, j, k) are the exponents of the barycentric coordinates w.r.t. vertices(cell).
std::array<int, 15> bernstein24(const Cell& support_cell);

// Generator evaluated at a point in lattice units relative to its shift.
Jet evaluate(double x, double y, int order = 0);
// Generator polynomial piece on a given support cell (no point location).
Jet evaluate_on(const Cell& support_cell, double x, double y, int order);

// Translate beta_s(x) = M(x / h - s), derivatives with respect to x.
Jet evaluate_fast(double h, IVec2 shift, double x, double y, int order = 0);

}  // namespace quartic

// Least-squares reproduction of monomials of total degree <= q by translates on a window;
// maximum residual at interior sample points.
double polynomial_reproduction_check(const BoxSplineDescriptor& d, int q);

}  // namespace hibox
