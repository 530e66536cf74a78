#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "hibox/geometry.hpp"
#include "hibox/strip.hpp"

namespace hibox {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Field = std::function<double(const Vec2&)>;

struct ProblemSpec {
  double kappa = 1.0;
  Vec2 a = Vec2::Zero();
  Field f = [](const Vec2&) { return 0.0; };
  Field g = [](const Vec2&) { return 0.0; };
  double eta = 0.0;    // <= 0 selects 2 / kappa
  double delta = 0.0;  // SUPG parameter
  // Flux equation with (sigma / kappa + grad u) instead of (sigma / kappa - grad u).
  bool flipped_flux_signs = false;
  int boundary_points = 6;  // Gauss points per boundary edge

  double effective_eta() const { return eta > 0.0 ? eta : 2.0 / kappa; }
  double alpha(const Vec2& normal) const {
    const double an = a.dot(normal);
    return an < 0.0 ? -an : 0.0;
  }
  void validate() const;
};

struct VolumePoint {
  Vec2 param;
  Vec2 x;
  double weight = 0.0;  // physical
  int leaf = -1;
};

// Degree-8 rule on every leaf, weights carrying |det J|.  Leaves with a vertex at a singular
// point of the map get a collapsed 8x8 Gauss rule instead.
std::vector<VolumePoint> volume_quadrature(const HierarchicalMesh& mesh, const GeometryMap& map);

struct BlockSystem {
  int nh = 0;  // volume dof
  int mh = 0;  // scalar flux dof; the flux vector has 2 * mh entries
  SparseMatrix Kuu, Auu, Kin, Guu, S1, S2;
  SparseMatrix Kus, Gus;  // nh x 2mh
  SparseMatrix Ksu, Gsu;  // 2mh x nh
  SparseMatrix Kss;       // 2mh x 2mh
  Vector f, gug, sf, gsg;

  SparseMatrix uu() const { return Kuu + Auu + Kin + Guu + S1 + S2; }
  SparseMatrix us() const { return Kus + Gus; }
  SparseMatrix su() const { return Ksu + Gsu; }
  Vector rhs_u() const { return f + gug + sf; }
  SparseMatrix full() const;
};

BlockSystem assemble(const ProblemSpec& problem, const HierarchicalMesh& mesh, const HierarchicalBasis& V,
                     const BoundaryStrip& strip, const HierarchicalBasis& W, const GeometryMap& map);

enum class SolverKind { Auto, Schur, Monolithic };

struct Solution {
  Vector U, Sigma;
  double residual_u = 0.0;      // relative, first block row
  double residual_sigma = 0.0;  // relative, second block row
  std::string method;
};

// Eliminates the flux through K_ss and factors the reduced matrix.
Solution schur_solve(const BlockSystem& sys);
Solution monolithic_solve(const BlockSystem& sys);
// Auto picks Schur for small strips.
Solution solve(const BlockSystem& sys, SolverKind kind = SolverKind::Auto);

// Parametric point and its image; analytic references use only the latter.
using Reference = std::function<double(const Vec2& param, const Vec2& x)>;

struct ErrorReport {
  double max_error = 0.0;
  std::size_t samples = 0;
  struct Sample {
    Vec2 param, x;
    double uh, error;
  };
  std::vector<Sample> field;  // grid samples only
};

// |u - u_h| on the lattice two levels below the finest leaves and at all volume quadrature points.
ErrorReport error_report(const std::vector<double>& U, const HierarchicalBasis& V, const HierarchicalMesh& mesh,
                         const GeometryMap& map, const Reference& reference);

std::string export_coo(const SparseMatrix& A);

}  // namespace hibox
