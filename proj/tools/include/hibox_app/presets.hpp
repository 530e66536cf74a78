#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hibox/fem.hpp"
#include "hibox_app/config.hpp"

namespace hibox::app {

enum class TableKind { MaxError, MinMax };

struct Preset {
  std::string name;
  Region domain;  // level-0 cells
  double h0 = 1.0;
  GeometryMap map;
  std::string default_mode = "predefined";
  int max_predefined_levels = 0;  // 0: any
  TableKind table = TableKind::MaxError;
  // R^1 .. R^(N-1) for N levels.
  std::function<std::vector<Region>(int levels)> regions;
  std::function<ProblemSpec(const HierarchicalMesh&, const RunConfig&)> problem;
  // Physical exact solution; empty when a reference solve stands in.
  std::function<double(const Vec2&)> exact;
};

const std::vector<std::string>& preset_names();
// Throws ConfigError for unknown names.
Preset make_preset(const std::string& name);

// Domain cells at level N - 1 renumbered as level-0 cells (uniform meshes).
Region refine_domain(const Region& domain, int levels);

// C2 piecewise cubic 0 -> 1 on [-1.5, 1.5]: the integral of the centred quadratic B-spline.
double smooth_step(double t);

}  // namespace hibox::app
