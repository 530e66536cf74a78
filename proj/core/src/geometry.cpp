#include "hibox/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "hibox/quadrature.hpp"

namespace hibox {

namespace {

// Second-order forward-mode jet in two variables.
struct D2 {
  double v = 0.0;
  double g[2] = {0.0, 0.0};
  double h[3] = {0.0, 0.0, 0.0};  // rr, rs, ss

  D2() = default;
  D2(double c) : v(c) {}  // NOLINT
  static D2 var(double x, int k) {
    D2 d(x);
    d.g[k] = 1.0;
    return d;
  }
};

D2 operator+(const D2& a, const D2& b) {
  D2 r(a.v + b.v);
  for (int k = 0; k < 2; ++k) r.g[k] = a.g[k] + b.g[k];
  for (int k = 0; k < 3; ++k) r.h[k] = a.h[k] + b.h[k];
  return r;
}

D2 operator-(const D2& a) {
  D2 r(-a.v);
  for (int k = 0; k < 2; ++k) r.g[k] = -a.g[k];
  for (int k = 0; k < 3; ++k) r.h[k] = -a.h[k];
  return r;
}

D2 operator-(const D2& a, const D2& b) { return a + (-b); }

D2 operator*(const D2& a, const D2& b) {
  D2 r(a.v * b.v);
  for (int k = 0; k < 2; ++k) r.g[k] = a.g[k] * b.v + a.v * b.g[k];
  r.h[0] = a.h[0] * b.v + 2 * a.g[0] * b.g[0] + a.v * b.h[0];
  r.h[1] = a.h[1] * b.v + a.g[0] * b.g[1] + a.g[1] * b.g[0] + a.v * b.h[1];
  r.h[2] = a.h[2] * b.v + 2 * a.g[1] * b.g[1] + a.v * b.h[2];
  return r;
}

// phi(a) with phi', phi'' given at a.v
D2 chain(const D2& a, double f, double f1, double f2) {
  D2 r(f);
  for (int k = 0; k < 2; ++k) r.g[k] = f1 * a.g[k];
  r.h[0] = f1 * a.h[0] + f2 * a.g[0] * a.g[0];
  r.h[1] = f1 * a.h[1] + f2 * a.g[0] * a.g[1];
  r.h[2] = f1 * a.h[2] + f2 * a.g[1] * a.g[1];
  return r;
}

D2 inv(const D2& a) { return chain(a, 1 / a.v, -1 / (a.v * a.v), 2 / (a.v * a.v * a.v)); }
D2 operator/(const D2& a, const D2& b) { return a * inv(b); }
D2 sqrt(const D2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

struct Pair {
  D2 x, y;
};

Pair quarter_circle_map(const D2& r, const D2& s) {
  const D2 t = s - 1.0;
  const D2 rho = sqrt(r * r + t * t);
  const D2 f = -r + s + rho - 2.0 * r * t / rho;
  return {f * r, f * t + 1.0};
}

Pair z_wave_map(const D2& r, const D2& s) {
  return {r / 9.0 - s * s / 1210.0, s / 11.0 + (14.0 * r * r * r - 195.0 * r * r + 600.0 * r) / 5000.0};
}

Pair triangle_hole_map(const D2& r, const D2& s) {
  const D2 x = r / 16.0 + 9.0 * s * s * s / 20480.0 - 27.0 * s * s / 2560.0 + 9.0 * s / 160.0;
  const D2 y = s / 16.0 - 9.0 * r * r * r / 20480.0 + 27.0 * r * r / 2560.0 - 9.0 * r / 160.0;
  return {x, y};
}

D2 polynomial(const std::vector<std::vector<double>>& c, const D2& r, const D2& s) {
  D2 out(0.0);
  D2 ri(1.0);
  for (const auto& row : c) {
    D2 sj(1.0);
    D2 acc(0.0);
    for (double a : row) {
      if (a != 0.0) acc = acc + a * sj;
      sj = sj * s;
    }
    out = out + ri * acc;
    ri = ri * r;
  }
  return out;
}

MapSample to_sample(const Pair& p) {
  MapSample m;
  m.x = {p.x.v, p.y.v};
  m.J << p.x.g[0], p.x.g[1], p.y.g[0], p.y.g[1];
  m.H[0] << p.x.h[0], p.x.h[1], p.x.h[1], p.x.h[2];
  m.H[1] << p.y.h[0], p.y.h[1], p.y.h[1], p.y.h[2];
  return m;
}

}  // namespace

GeometryMap GeometryMap::identity() { return {}; }

GeometryMap GeometryMap::affine(const Mat2& A, const Vec2& b) {
  GeometryMap g;
  g.kind_ = Kind::Affine;
  g.A_ = A;
  g.b_ = b;
  return g;
}

GeometryMap GeometryMap::quarter_circle() {
  GeometryMap g;
  g.kind_ = Kind::QuarterCircle;
  return g;
}

GeometryMap GeometryMap::z_wave() {
  GeometryMap g;
  g.kind_ = Kind::ZWave;
  return g;
}

GeometryMap GeometryMap::triangle_hole_wave() {
  GeometryMap g;
  g.kind_ = Kind::TriangleHoleWave;
  return g;
}

GeometryMap GeometryMap::user_polynomial(std::vector<std::vector<double>> cx, std::vector<std::vector<double>> cy) {
  if (cx.empty() || cy.empty()) throw std::invalid_argument("user polynomial map needs coefficients for x and y");
  GeometryMap g;
  g.kind_ = Kind::UserPolynomial;
  g.cx_ = std::move(cx);
  g.cy_ = std::move(cy);
  return g;
}

GeometryMap GeometryMap::by_name(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "quarter_circle") return quarter_circle();
  if (name == "z_wave") return z_wave();
  if (name == "triangle_hole_wave") return triangle_hole_wave();
  throw std::invalid_argument("unknown map '" + name + "'");
}

std::string GeometryMap::name() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::Affine:
      return "affine";
    case Kind::QuarterCircle:
      return "quarter_circle";
    case Kind::ZWave:
      return "z_wave";
    case Kind::TriangleHoleWave:
      return "triangle_hole_wave";
    case Kind::UserPolynomial:
      return "user_polynomial";
  }
  return "?";
}

MapSample GeometryMap::sample(const Vec2& p, int order) const {
  MapSample m;
  switch (kind_) {
    case Kind::Identity:
      m.x = p;
      return m;
    case Kind::Affine:
      m.x = A_ * p + b_;
      m.J = A_;
      return m;
    case Kind::QuarterCircle:
      // the corner (0, 1) is a point singularity of the formula
      if (std::hypot(p.x(), p.y() - 1.0) < 1e-300) {
        m.x = {0.0, 1.0};
        return m;
      }
      break;
    default:
      break;
  }
  // the jet is cheap enough that lower orders share it
  (void)order;
  const D2 r = D2::var(p.x(), 0), s = D2::var(p.y(), 1);
  switch (kind_) {
    case Kind::QuarterCircle:
      return to_sample(quarter_circle_map(r, s));
    case Kind::ZWave:
      return to_sample(z_wave_map(r, s));
    case Kind::TriangleHoleWave:
      return to_sample(triangle_hole_map(r, s));
    case Kind::UserPolynomial:
      return to_sample({polynomial(cx_, r, s), polynomial(cy_, r, s)});
    default:
      return m;
  }
}

std::vector<Vec2> GeometryMap::singular_points() const {
  if (kind_ == Kind::QuarterCircle) return {Vec2(0.0, 1.0)};
  return {};
}

Vec2 GeometryMap::eval(const Vec2& p) const { return sample(p, 0).x; }
Mat2 GeometryMap::jacobian(const Vec2& p) const { return sample(p, 1).J; }

std::optional<Vec2> GeometryMap::inverse(const Vec2& x, const Vec2& guess, double tol, int max_iter) const {
  Vec2 p = guess;
  for (int it = 0; it < max_iter; ++it) {
    const MapSample m = sample(p, 1);
    const Vec2 res = m.x - x;
    if (res.norm() <= tol) return p;
    const double det = m.det();
    if (!(std::abs(det) > 0.0)) return std::nullopt;
    p -= m.J.inverse() * res;
  }
  if ((eval(p) - x).norm() <= tol) return p;
  return std::nullopt;
}

Jet push_forward(const Jet& parametric, const MapSample& m) {
  const double det = m.det();
  if (!(std::abs(det) > 0.0)) throw std::domain_error("singular Jacobian");
  const Mat2 Jinv = m.J.inverse();
  const Vec2 g = Jinv.transpose() * Vec2(parametric.dx, parametric.dy);
  Mat2 Hp;
  Hp << parametric.dxx, parametric.dxy, parametric.dxy, parametric.dyy;
  const Mat2 Hx = Jinv.transpose() * (Hp - g.x() * m.H[0] - g.y() * m.H[1]) * Jinv;
  Jet out;
  out.value = parametric.value;
  out.dx = g.x();
  out.dy = g.y();
  out.dxx = Hx(0, 0);
  out.dxy = 0.5 * (Hx(0, 1) + Hx(1, 0));
  out.dyy = Hx(1, 1);
  return out;
}

std::vector<BoundaryPoint> boundary_quadrature(const GeometryMap& map, const HierarchicalMesh& mesh, int points) {
  if (points < 1) throw std::invalid_argument("boundary quadrature needs at least one point");
  const GaussRule rule = gauss_legendre(points);
  std::vector<BoundaryPoint> out;
  out.reserve(mesh.boundary_edges().size() * rule.nodes.size());
  for (const auto& be : mesh.boundary_edges()) {
    const Cell& c = mesh.leaves()[be.leaf].cell;
    const auto v = vertices(c);
    const double sc = mesh.h0() * std::ldexp(1.0, -c.level);
    const Vec2 a(v[be.edge].x * sc, v[be.edge].y * sc);
    const Vec2 b(v[(be.edge + 1) % 3].x * sc, v[(be.edge + 1) % 3].y * sc);
    const Vec2 t = b - a;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      BoundaryPoint bp;
      bp.param = a + rule.nodes[q] * t;
      const MapSample m = map.sample(bp.param, 1);
      const Vec2 T = m.J * t;
      const double len = T.norm();
      if (!(len > 1e-300)) throw std::domain_error("degenerate mapped boundary edge at " + to_string(c));
      bp.x = m.x;
      bp.normal = Vec2(T.y(), -T.x()) / len;
      bp.weight = rule.weights[q] * len;
      bp.leaf = be.leaf;
      out.push_back(bp);
    }
  }
  return out;
}

}  // namespace hibox
