#include "hibox_app/presets.hpp"

#include <cmath>
#include <numbers>

namespace hibox::app {

namespace {

// Level-0 cells of an extent_x x extent_y lattice block whose centroid satisfies pred.
Region cells_where(int nx, int ny, const std::function<bool(double, double)>& pred) {
  Region r;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (pred(i + 2.0 / 3.0, j + 1.0 / 3.0)) r.insert(Cell{0, i, j, Orient::Lower});
      if (pred(i + 1.0 / 3.0, j + 2.0 / 3.0)) r.insert(Cell{0, i, j, Orient::Upper});
    }
  }
  return r;
}

Vec2 centroid(const Cell& c, double h0) {
  const auto v = vertices(c);
  const double s = h0 * std::ldexp(1.0, -c.level);
  return {s * (v[0].x + v[1].x + v[2].x) / 3.0, s * (v[0].y + v[1].y + v[2].y) / 3.0};
}

double nearest_vertex_distance(const Cell& c, const Vec2& p) {
  const double s = std::ldexp(1.0, -c.level);
  double d = INFINITY;
  for (const IVec2& v : vertices(c)) d = std::min(d, std::hypot(v.x * s - p.x(), v.y * s - p.y()));
  return d;
}

// Nested regions from per-level cell filters applied to the previous region.
std::vector<Region> nested(const Region& domain, int levels, const std::function<bool(int, const Cell&)>& keep) {
  std::vector<Region> out;
  const Region* parent = &domain;
  for (int l = 1; l < levels; ++l) {
    Region r;
    for (const Cell& c : parent->full_cells_at(l - 1))
      if (keep(l, c)) r.insert(c);
    out.push_back(std::move(r));
    parent = &out.back();
  }
  return out;
}

// Centroid within rho(l) cell widths of one of the corners.
std::function<bool(int, const Cell&)> near_corners(std::vector<Vec2> corners, std::function<double(int)> rho) {
  return [corners = std::move(corners), rho = std::move(rho)](int l, const Cell& c) {
    const Vec2 m = centroid(c, 1.0);
    const double w = std::ldexp(1.0, -c.level);
    for (const Vec2& p : corners)
      if ((m - p).norm() <= rho(l) * w + 1e-12) return true;
    return false;
  };
}

ProblemSpec poisson(const RunConfig& cfg) {
  ProblemSpec ps;
  ps.flipped_flux_signs = cfg.signs == "flipped";
  return ps;
}

Preset hexagon() {
  Preset p;
  p.name = "hexagon";
  p.domain = cells_where(12, 12, [](double x, double y) {
    return x > 0 && y > 0 && x < 10 && y < 11 && x - y > -7 && x - y < 6;
  });
  p.h0 = 1.0;
  p.map = GeometryMap::identity();
  p.max_predefined_levels = 4;
  p.regions = [d = p.domain](int levels) {
    static const double radius[] = {std::sqrt(45.0), 6.4, 4.6};
    return nested(d, levels, [](int l, const Cell& c) {
      return nearest_vertex_distance(c, Vec2::Zero()) <= radius[l - 1] + 1e-9;
    });
  };
  p.exact = [](const Vec2& x) { return std::exp(-x.squaredNorm() / 4.0); };
  p.problem = [u = p.exact](const HierarchicalMesh&, const RunConfig& cfg) {
    ProblemSpec ps = poisson(cfg);
    ps.f = [u](const Vec2& x) { return -u(x) * (x.squaredNorm() / 4.0 - 1.0); };
    ps.g = u;
    return ps;
  };
  return p;
}

Preset quarter_circle() {
  Preset p;
  p.name = "quarter_circle";
  // r <= s in [0, 1]^2 at h0 = 1/4
  p.domain = cells_where(4, 4, [](double x, double y) { return y > x; });
  p.h0 = 0.25;
  p.map = GeometryMap::quarter_circle();
  p.max_predefined_levels = 4;
  const Vec2 peak(std::numbers::sqrt2 / 2.0, 1.0 - std::numbers::sqrt2 / 2.0);
  p.regions = [d = p.domain, map = p.map, peak](int levels) {
    auto dist = [&](const Cell& c) { return (map.eval(centroid(c, 0.25)) - peak).norm(); };
    std::vector<Region> out;
    if (levels < 2) return out;
    Region r1;
    for (const Cell& c : d.full_cells_at(0))
      if (!(c.i == 0 && c.j == 3 && c.orient == Orient::Upper)) r1.insert(c);
    out.push_back(r1);
    if (levels < 3) return out;
    Region r2;
    for (const Cell& c : r1.full_cells_at(1))
      if (dist(c) <= 0.625) r2.insert(c);
    out.push_back(r2);
    if (levels < 4) return out;
    // selected on level-3 cells, then aligned to level 2 by the mesh builder
    Region r3;
    for (const Cell& c : r2.full_cells_at(3))
      if (dist(c) <= 0.4865) r3.insert(c);
    out.push_back(r3);
    return out;
  };
  p.exact = [peak](const Vec2& x) { return std::exp(-25.0 * (x - peak).squaredNorm()); };
  p.problem = [u = p.exact, peak](const HierarchicalMesh&, const RunConfig& cfg) {
    ProblemSpec ps = poisson(cfg);
    ps.f = [u, peak](const Vec2& x) { return 100.0 * u(x) * (1.0 - 25.0 * (x - peak).squaredNorm()); };
    ps.g = u;
    return ps;
  };
  return p;
}

Preset z_shape() {
  Preset p;
  p.name = "z_shape";
  p.domain = cells_where(9, 11, [](double x, double y) { return y < 3 || y > 8 || (y - x > -1 && y - x < 3); });
  p.h0 = 1.0;
  p.map = GeometryMap::z_wave();
  p.regions = [d = p.domain](int levels) {
    return nested(d, levels, near_corners({Vec2(4, 3), Vec2(5, 8)}, [](int l) { return l == 1 ? 1.0 : 2.25; }));
  };
  p.problem = [](const HierarchicalMesh&, const RunConfig& cfg) {
    ProblemSpec ps = poisson(cfg);
    ps.f = [](const Vec2&) { return 1.0; };
    return ps;
  };
  return p;
}

Preset triangle_hole() {
  Preset p;
  p.name = "triangle_hole";
  p.domain = cells_where(16, 16, [](double x, double y) { return y > x && !(x > 3 && y < 13 && y - x > 4); });
  p.h0 = 1.0;
  p.map = GeometryMap::triangle_hole_wave();
  p.regions = [d = p.domain](int levels) {
    return nested(d, levels, near_corners({Vec2(3, 7), Vec2(3, 13), Vec2(9, 13)}, [](int) { return 2.0; }));
  };
  p.problem = [](const HierarchicalMesh&, const RunConfig& cfg) {
    ProblemSpec ps = poisson(cfg);
    ps.f = [](const Vec2&) { return 1.0; };
    return ps;
  };
  return p;
}

Preset unit_square_advection() {
  Preset p;
  p.name = "unit_square_advection";
  p.domain = cells_where(20, 20, [](double, double) { return true; });
  p.h0 = 1.0 / 20.0;
  p.map = GeometryMap::identity();
  p.default_mode = "adaptive";
  p.table = TableKind::MinMax;
  p.regions = [](int levels) {
    if (levels > 1) throw ConfigError("unit_square_advection has no predefined refinement; use adaptive or uniform");
    return std::vector<Region>{};
  };
  p.problem = [](const HierarchicalMesh& mesh, const RunConfig& cfg) {
    const double theta = std::numbers::pi / 4.0;
    const double y0 = 0.3;
    const double h = mesh.h(mesh.num_levels() - 1);
    ProblemSpec ps;
    ps.flipped_flux_signs = cfg.signs == "flipped";
    ps.kappa = 1e-6;
    ps.a = Vec2(std::cos(theta), std::sin(theta));
    ps.delta = h / (2.0 * std::max(std::cos(theta), std::sin(theta)) * ps.a.norm());
    // 1 on the bottom edge and on the left edge below y0, 0 elsewhere; each jump is replaced by
    // a C2 transition of the configured width measured along the boundary
    const double k = cfg.smoothing_width * h / 3.0;
    ps.g = [k, y0](const Vec2& x) {
      const double d[4] = {x.y(), 1.0 - x.x(), 1.0 - x.y(), x.x()};
      int e = 0;
      for (int q = 1; q < 4; ++q)
        if (d[q] < d[e]) e = q;
      const double s = e == 0 ? x.x() : e == 1 ? 1.0 + x.y() : e == 2 ? 3.0 - x.x() : 4.0 - x.y();
      auto step = [k](double t) { return k > 0.0 ? smooth_step(t / k) : (t >= 0.0 ? 1.0 : 0.0); };
      if (s > 2.5) return step(s - (4.0 - y0));
      return 1.0 - step(s - 1.0);
    };
    return ps;
  };
  return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> n = {"hexagon", "quarter_circle", "z_shape", "triangle_hole",
                                             "unit_square_advection"};
  return n;
}

Preset make_preset(const std::string& name) {
  if (name == "hexagon") return hexagon();
  if (name == "quarter_circle") return quarter_circle();
  if (name == "z_shape") return z_shape();
  if (name == "triangle_hole") return triangle_hole();
  if (name == "unit_square_advection") return unit_square_advection();
  throw ConfigError("unknown preset '" + name + "'");
}

Region refine_domain(const Region& domain, int levels) {
  Region out;
  for (Cell c : domain.full_cells_at(levels - 1)) {
    c.level = 0;
    out.insert(c);
  }
  return out;
}

double smooth_step(double t) {
  if (t <= -1.5) return 0.0;
  if (t >= 1.5) return 1.0;
  if (t <= -0.5) {
    const double u = t + 1.5;
    return u * u * u / 6.0;
  }
  if (t <= 0.5) return 0.5 + 0.75 * t - t * t * t / 3.0;
  const double u = 1.5 - t;
  return 1.0 - u * u * u / 6.0;
}

}  // namespace hibox::app
