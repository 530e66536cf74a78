#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hibox/boxspline.hpp"
#include "hibox/lattice.hpp"

namespace hibox {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Nested regions R^0 ⊇ R^1 ⊇ ... ; R^0 is the domain.
class Hierarchy {
 public:
  Hierarchy() = default;
  explicit Hierarchy(std::vector<Region> levels);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Region& domain() const { return levels_.at(0); }
  // Empty region for levels at or beyond num_levels().
  const Region& level(int l) const;

 private:
  std::vector<Region> levels_;
  Region empty_;
};

// An element of the hierarchical mesh: `cell` lies in R^level and outside R^(level+1).
// cell.level can exceed level when R^(level+1) covers part of the parent.
struct Leaf {
  Cell cell;
  int level = 0;
};

struct MeshReport {
  bool nesting_completed = false;  // some refinement was clipped to its parent region
  bool realigned = false;          // some refinement had cells finer than its level
  int dropped_levels = 0;          // empty trailing levels removed
};

class HierarchicalMesh {
 public:
  HierarchicalMesh(Hierarchy hierarchy, double h0);

  int num_levels() const { return hierarchy_.num_levels(); }
  const Hierarchy& hierarchy() const { return hierarchy_; }
  const Region& domain() const { return hierarchy_.domain(); }
  const Region& region(int l) const { return hierarchy_.level(l); }
  double h0() const { return h0_; }
  double h(int level) const;

  const std::vector<Leaf>& leaves() const { return leaves_; }
  // Index of a leaf containing the parametric point (closure), or -1.
  int locate_leaf(const Vec2& p, double tol = 1e-10) const;
  int leaf_index(const Cell& c) const;

  // Leaves whose closure touches the domain boundary, with the boundary edge indices.
  struct BoundaryEdge {
    int leaf = 0;
    int edge = 0;  // edge k joins vertices(cell)[k] and vertices(cell)[k+1]
  };
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

 private:
  Hierarchy hierarchy_;
  double h0_;
  std::vector<Leaf> leaves_;
  std::unordered_map<std::uint64_t, int> leaf_of_;
  std::vector<BoundaryEdge> boundary_edges_;
};

// Nesting is completed by clipping each region to its parent; cells finer than the
// region level are replaced by their level ancestors.
HierarchicalMesh build_mesh(const Region& domain, const std::vector<Region>& refine, double h0,
                            MeshReport* report = nullptr);

// Level-0 cells whose closure meets the domain boundary.
bool closure_touches_boundary(const Region& domain, const Cell& c);
// Edge k of cell c lies on the boundary of the domain.
bool edge_on_boundary(const Region& domain, const Cell& c, int k);

enum class Variant { HBox, THBox };

struct Term {
  int level = 0;
  IVec2 shift;
  double coef = 1.0;  // dyadic, exact in binary floating point
};

struct BasisFunction {
  int level = 0;
  IVec2 shift;
  bool truncated = false;
  std::vector<Term> terms;
};

// Level-l cells in the support of translate s (24 cells).
std::array<Cell, 24> support_of(int level, IVec2 shift);
// Shifts s of level-c.level translates whose support contains c (12 shifts).
std::array<IVec2, 12> shifts_over(const Cell& c);

// Pieces of supp(beta^l_s) ∩ D as cells (descending where D is partial).
std::vector<Cell> support_pieces(const Region& D, int level, IVec2 shift);

// Membership test: supp ∩ R^0 non-empty, contained in R^l, not contained in R^(l+1).
bool is_active(const Hierarchy& H, int level, IVec2 shift);

class HierarchicalBasis {
 public:
  HierarchicalBasis() = default;
  HierarchicalBasis(Variant variant, std::vector<BasisFunction> functions, double h0, int num_levels);

  Variant variant() const { return variant_; }
  const std::vector<BasisFunction>& functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }
  int num_levels() const { return num_levels_; }
  double h0() const { return h0_; }
  double h(int level) const;
  std::vector<std::size_t> count_per_level() const;
  Vec2 anchor(std::size_t index) const;

  struct Contribution {
    int function;
    Jet jet;
  };
  // All functions with nonzero jet at p, sorted by function index.
  void evaluate_all(const Vec2& p, int order, std::vector<Contribution>& out) const;
  Jet evaluate(const std::vector<double>& coefficients, const Vec2& p, int order = 0) const;
  Jet evaluate_function(std::size_t index, const Vec2& p, int order = 0) const;
  int find(int level, IVec2 shift) const;

 private:
  Variant variant_ = Variant::HBox;
  std::vector<BasisFunction> functions_;
  double h0_ = 1.0;
  int num_levels_ = 0;
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::pair<int, double>>>> term_index_;
  std::unordered_map<std::uint64_t, int> by_shift_;
};

HierarchicalBasis hbox_basis(const Hierarchy& H, double h0);
HierarchicalBasis hbox_basis(const HierarchicalMesh& mesh);
HierarchicalBasis thbox_basis(const Hierarchy& H, double h0);
HierarchicalBasis thbox_basis(const HierarchicalMesh& mesh);
HierarchicalBasis make_basis(const Hierarchy& H, double h0, Variant v);

// Truncated expansion of an HBox member.  Throws std::invalid_argument if not a member.
BasisFunction truncate(const BasisFunction& f, const Hierarchy& H);

// Cells (mixed levels) covering the nonzero set of f intersected with D.
Region function_support(const BasisFunction& f, const Region& D);

// Plain-text exports.
std::string export_mesh_level(const HierarchicalMesh& mesh, int level);
std::string export_basis(const HierarchicalBasis& basis);

std::uint64_t shift_key(int level, IVec2 s);

}  // namespace hibox
