#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hibox/hierarchy.hpp"
#include "hibox/quadrature.hpp"

namespace fixtures {

using namespace hibox;

// Level-l cells whose centroid (in level-0 units) satisfies pred.
inline Region cells_where(int level, int extent, const std::function<bool(double, double)>& pred) {
  Region r;
  const int n = extent << level;
  const double s = std::ldexp(1.0, -level);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (pred((i + 2.0 / 3.0) * s, (j + 1.0 / 3.0) * s)) r.insert(Cell{level, i, j, Orient::Lower});
      if (pred((i + 1.0 / 3.0) * s, (j + 2.0 / 3.0) * s)) r.insert(Cell{level, i, j, Orient::Upper});
    }
  }
  return r;
}

inline Region square(int n) {
  return cells_where(0, n, [n](double x, double y) { return x < n && y < n; });
}

struct Fixture {
  std::string name;
  HierarchicalMesh mesh;
};

inline std::vector<Fixture> regression_meshes() {
  std::vector<Fixture> out;
  // 4x4 squares with the central 2x2 refined
  out.push_back({"toy", build_mesh(square(4), {cells_where(1, 4, [](double x, double y) {
                                     return x > 1 && x < 3 && y > 1 && y < 3;
                                   })},
                                   1.0)});
  // diamond refined once
  auto diamond = [](double r) {
    return [r](double x, double y) { return std::abs(x - 4) + std::abs(y - 4) < r; };
  };
  out.push_back({"diamond", build_mesh(square(8), {cells_where(1, 8, diamond(2.5))}, 1.0)});
  // diamond refined twice inside a triangle domain
  Region tri = cells_where(0, 10, [](double x, double y) { return y < x; });
  out.push_back({"three-level", build_mesh(tri, {cells_where(1, 10, [](double x, double y) {
                                                  return std::abs(x - 6) + std::abs(y - 3) < 3;
                                                }),
                                                 cells_where(2, 10, [](double x, double y) {
                                                   return std::abs(x - 6.5) + std::abs(y - 2.5) < 1.6;
                                                 })},
                                           0.5)});
  return out;
}

// Refinements reaching the boundary.
inline std::vector<Fixture> boundary_meshes() {
  std::vector<Fixture> out;
  out.push_back({"edge", build_mesh(square(8), {cells_where(1, 8, [](double x, double) { return x < 3; }),
                                                cells_where(2, 8, [](double x, double y) { return x < 1.5 && y < 4; })},
                                    1.0)});
  out.push_back({"corner", build_mesh(square(6), {cells_where(1, 6, [](double x, double y) { return x + y < 5; }),
                                                  cells_where(2, 6, [](double x, double y) { return x + y < 3; }),
                                                  cells_where(3, 6, [](double x, double y) { return x + y < 1.2; })},
                                      1.0)});
  out.push_back({"diagonal", build_mesh(cells_where(0, 8, [](double x, double y) { return y < x; }),
                                        {cells_where(1, 8, [](double x, double y) { return x - y < 2.5; }),
                                         cells_where(2, 8, [](double x, double y) { return x - y < 1 && x > 3; })},
                                        0.5)});
  return out;
}

// Random blobs: each level refines a random set of parent cells and their edge neighbours.
inline Fixture random_mesh(unsigned seed, int n = 6, int levels = 3) {
  std::mt19937 rng(seed);
  const Region D = square(n);
  std::vector<Region> refine;
  Region parent = D;
  for (int l = 1; l < levels; ++l) {
    const auto cand = parent.full_cells_at(l - 1);
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    Region r;
    const int seeds = 1 + static_cast<int>(cand.size() / 12);
    for (int k = 0; k < seeds; ++k) {
      const Cell c = cand[pick(rng)];
      r.insert(c);
      for (const Cell& nb : edge_neighbors(c)) {
        if (parent.contains(nb)) r.insert(nb);
      }
    }
    refine.push_back(r);
    parent = r;
  }
  return {"random-" + std::to_string(seed), build_mesh(D, refine, 1.0)};
}

inline std::vector<Vec2> random_points(const HierarchicalMesh& mesh, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, mesh.leaves().size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts;
  for (int k = 0; k < n; ++k) {
    const Cell c = mesh.leaves()[pick(rng)].cell;
    double a = u(rng), b = u(rng);
    if (a + b > 1) {
      a = 1 - a;
      b = 1 - b;
    }
    const auto v = vertices(c);
    const double s = mesh.h0() * std::ldexp(1.0, -c.level);
    pts.emplace_back(s * (v[0].x + a * (v[1].x - v[0].x) + b * (v[2].x - v[0].x)),
                     s * (v[0].y + a * (v[1].y - v[0].y) + b * (v[2].y - v[0].y)));
  }
  return pts;
}

// Degree-8 quadrature nodes on every leaf: a quartic vanishing at all of them vanishes on the leaf.
inline std::vector<Vec2> leaf_nodes(const HierarchicalMesh& mesh) {
  std::vector<Vec2> pts;
  for (const Leaf& l : mesh.leaves()) {
    const auto v = vertices(l.cell);
    const double s = mesh.h0() * std::ldexp(1.0, -l.cell.level);
    for (const auto& b : triangle_rule_degree8().bary) {
      pts.emplace_back(s * (b[0] * v[0].x + b[1] * v[1].x + b[2] * v[2].x),
                       s * (b[0] * v[0].y + b[1] * v[1].y + b[2] * v[2].y));
    }
  }
  return pts;
}

}  // namespace fixtures
