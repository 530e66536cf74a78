#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "hibox/hierarchy.hpp"

namespace hibox {

// Value, Jacobian (rows: x, y; columns: r, s) and per-component Hessians of F at a point.
struct MapSample {
  Vec2 x = Vec2::Zero();
  Mat2 J = Mat2::Identity();
  std::array<Mat2, 2> H{Mat2::Zero(), Mat2::Zero()};
  double det() const { return J.determinant(); }
};

class GeometryMap {
 public:
  enum class Kind { Identity, Affine, QuarterCircle, ZWave, TriangleHoleWave, UserPolynomial };

  GeometryMap() = default;
  static GeometryMap identity();
  static GeometryMap affine(const Mat2& A, const Vec2& b);
  // Unit triangle {0 <= r <= s <= 1} onto the quarter disk centred at (0, 1).
  static GeometryMap quarter_circle();
  static GeometryMap z_wave();
  static GeometryMap triangle_hole_wave();
  // x = sum cx[i][j] r^i s^j, y likewise.
  static GeometryMap user_polynomial(std::vector<std::vector<double>> cx, std::vector<std::vector<double>> cy);
  static GeometryMap by_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;

  Vec2 eval(const Vec2& p) const;
  Mat2 jacobian(const Vec2& p) const;
  // order 0: value only; 1: plus Jacobian; 2: plus Hessians.
  MapSample sample(const Vec2& p, int order = 2) const;

  // Parametric points where F is only Lipschitz (the quarter-circle corner).
  std::vector<Vec2> singular_points() const;

  // Newton iteration for F(p) = x from `guess`.
  std::optional<Vec2> inverse(const Vec2& x, const Vec2& guess, double tol = 1e-12, int max_iter = 50) const;

 private:
  Kind kind_ = Kind::Identity;
  Mat2 A_ = Mat2::Identity();
  Vec2 b_ = Vec2::Zero();
  std::vector<std::vector<double>> cx_, cy_;
};

// Parametric jet pushed to physical coordinates (needs a sample of order >= 1, >= 2 for Hessians).
Jet push_forward(const Jet& parametric, const MapSample& m);

struct BoundaryPoint {
  Vec2 param;
  Vec2 x;
  Vec2 normal;  // outward unit normal
  double weight = 0.0;  // arc length
  int leaf = -1;
};

// Gauss points on every boundary edge of the mesh leaves.  Throws on a degenerate mapped edge.
std::vector<BoundaryPoint> boundary_quadrature(const GeometryMap& map, const HierarchicalMesh& mesh, int points = 6);

}  // namespace hibox
