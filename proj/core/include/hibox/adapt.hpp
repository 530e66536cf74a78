#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hibox/fem.hpp"

namespace hibox {

// ||grad u_h||_{L2(pi)} per mesh leaf, physical gradient, volume quadrature.
std::vector<double> gradient_indicator(const std::vector<double>& U, const HierarchicalBasis& V,
                                       const GeometryMap& map, const HierarchicalMesh& mesh);

struct ThresholdRule {
  enum class Kind { FractionOfMax, Absolute, Quantile };
  Kind kind = Kind::FractionOfMax;
  double value = 0.5;

  // Cells strictly above the returned value are marked.
  double resolve(const std::vector<double>& indicators) const;
  static ThresholdRule parse(const std::string& kind, double value);
};

struct RefinementPlan {
  int step = 0;
  double threshold = 0.0;
  std::vector<std::vector<Cell>> marked;  // per hierarchy level, cells at that level
  std::vector<Region> enlarged;           // per level l, level-l cells to refine to l + 1

  bool empty() const;
  std::size_t marked_count() const;
};

// Hexagonal lattice distance for the directions (1,0), (0,1), (1,1).
int lattice_distance(IVec2 a, IVec2 b);

// Level-l cells of R^l whose vertices all lie within `dilation` lattice steps of a vertex of c.
std::vector<Cell> dilate_cell(const Cell& c, const HierarchicalMesh& mesh, int level, int dilation);

RefinementPlan mark_and_enlarge(const std::vector<double>& indicators, const HierarchicalMesh& mesh,
                                const ThresholdRule& rule, int dilation = 1);

// Refinement regions R^1, R^2, ... after applying the plan to the mesh.
std::vector<Region> apply_plan(const HierarchicalMesh& mesh, const RefinementPlan& plan);

struct AdaptiveOptions {
  int steps = 3;
  ThresholdRule rule;
  int dilation = 1;
  Variant variant = Variant::THBox;
  StripKind strip = StripKind::THBox;
  SolverKind solver = SolverKind::Auto;
};

struct AdaptiveStep {
  HierarchicalMesh mesh;
  HierarchicalBasis V;
  BoundaryStrip strip;
  HierarchicalBasis W;
  Solution solution;
  std::vector<double> indicators;
  RefinementPlan plan;  // empty on the last step
};

// The problem can depend on the mesh (SUPG parameter from the finest h).
using ProblemFactory = std::function<ProblemSpec(const HierarchicalMesh&)>;

// solve, indicate, mark and refine; steps + 1 solves unless a plan comes out empty.
std::vector<AdaptiveStep> adaptive_loop(const ProblemFactory& problem, const Region& domain, double h0,
                                        const GeometryMap& map, const AdaptiveOptions& options);

}  // namespace hibox
