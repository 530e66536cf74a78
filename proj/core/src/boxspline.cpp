#include "hibox/boxspline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "hibox/quadrature.hpp"

namespace hibox {

namespace {

std::int64_t det2(IVec2 a, IVec2 b) {
  return static_cast<std::int64_t>(a.x) * b.y - static_cast<std::int64_t>(a.y) * b.x;
}

int rank_of(const std::vector<IVec2>& cols) {
  bool any = false;
  for (std::size_t a = 0; a < cols.size(); ++a) {
    if (cols[a].x != 0 || cols[a].y != 0) any = true;
    for (std::size_t b = a + 1; b < cols.size(); ++b) {
      if (det2(cols[a], cols[b]) != 0) return 2;
    }
  }
  return any ? 1 : 0;
}

std::int64_t cross(IVec2 o, IVec2 a, IVec2 b) { return det2(a - o, b - o); }

std::vector<IVec2> convex_hull(std::vector<IVec2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<IVec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const IVec2& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double oracle_rec(const std::vector<IVec2>& cols, std::size_t n, double x, double y) {
  if (n == 2) {
    const double det = static_cast<double>(det2(cols[0], cols[1]));
    const double a = (x * cols[1].y - y * cols[1].x) / det;
    const double b = (cols[0].x * y - cols[0].y * x) / det;
    return (a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0) ? 1.0 / std::abs(det) : 0.0;
  }
  const IVec2 v = cols[n - 1];
  // parameters t where x - t v crosses a mesh line of the reduced box spline
  std::vector<double> breaks{0.0, 1.0};
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const double nx = -cols[a].y;
    const double ny = cols[a].x;
    const double nv = nx * v.x + ny * v.y;
    if (nv == 0.0) continue;
    const double s0 = nx * x + ny * y;
    const double s1 = s0 - nv;
    for (double k = std::ceil(std::min(s0, s1)); k <= std::floor(std::max(s0, s1)); k += 1.0) {
      const double t = (s0 - k) / nv;
      if (t > 0.0 && t < 1.0) breaks.push_back(t);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  // integrand is a polynomial of degree n - 3 between breaks
  const int m = std::max(1, static_cast<int>(n - 1) / 2);
  static thread_local std::map<int, GaussRule> rules;
  auto it = rules.find(m);
  if (it == rules.end()) it = rules.emplace(m, gauss_legendre(m)).first;
  const GaussRule& g = it->second;
  double sum = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double t0 = breaks[b];
    const double len = breaks[b + 1] - t0;
    if (len <= 1e-15) continue;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double t = t0 + len * g.nodes[q];
      sum += len * g.weights[q] * oracle_rec(cols, n - 1, x - t * v.x, y - t * v.y);
    }
  }
  return sum;
}

// Bivariate polynomial of total degree <= 4, coefficients c[a][b] of u^a v^b.
struct Poly {
  std::array<std::array<double, 5>, 5> c{};

  static Poly constant(double s) {
    Poly p;
    p.c[0][0] = s;
    return p;
  }
  static Poly linear(double c0, double cu, double cv) {
    Poly p;
    p.c[0][0] = c0;
    p.c[1][0] = cu;
    p.c[0][1] = cv;
    return p;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; a + b < 5; ++b)
        for (int a2 = 0; a + a2 < 5; ++a2)
          for (int b2 = 0; a + a2 + b + b2 < 5; ++b2) r.c[a + a2][b + b2] += c[a][b] * o.c[a2][b2];
    return r;
  }
  Poly& operator+=(const Poly& o) {
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) c[a][b] += o.c[a][b];
    return *this;
  }
};

struct CellPoly {
  bool in_support = false;
  Poly p;
};

int slot(const Cell& c) { return (c.j * 4 + c.i) * 2 + static_cast<int>(c.orient); }

bool in_box(const Cell& c) { return c.i >= 0 && c.i < 4 && c.j >= 0 && c.j < 4; }

const std::array<CellPoly, 32>& cell_polys() {
  static const std::array<CellPoly, 32> table = [] {
    std::array<CellPoly, 32> t{};
    const std::array<double, 5> fact = {1, 1, 2, 6, 24};
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 4; ++i) {
        for (Orient o : {Orient::Lower, Orient::Upper}) {
          const Cell c{0, i, j, o};
          const auto coef = quartic::bernstein24(c);
          CellPoly& cp = t[slot(c)];
          cp.in_support = std::any_of(coef.begin(), coef.end(), [](int v) { return v != 0; });
          if (!cp.in_support) continue;
          // barycentrics as linear polynomials in local (u, v)
          std::array<Poly, 3> b;
          if (o == Orient::Lower) {
            b = {Poly::linear(1, -1, 0), Poly::linear(0, 1, -1), Poly::linear(0, 0, 1)};
          } else {
            b = {Poly::linear(1, 0, -1), Poly::linear(0, 1, 0), Poly::linear(0, -1, 1)};
          }
          int idx = 0;
          for (int e0 = 4; e0 >= 0; --e0) {
            for (int e1 = 4 - e0; e1 >= 0; --e1, ++idx) {
              const int e2 = 4 - e0 - e1;
              if (coef[idx] == 0) continue;
              Poly term = Poly::constant(coef[idx] / 24.0 * fact[4] / (fact[e0] * fact[e1] * fact[e2]));
              for (int k = 0; k < e0; ++k) term = term * b[0];
              for (int k = 0; k < e1; ++k) term = term * b[1];
              for (int k = 0; k < e2; ++k) term = term * b[2];
              cp.p += term;
            }
          }
        }
      }
    }
    return t;
  }();
  return table;
}

Jet eval_poly(const Poly& p, double u, double v, int order) {
  std::array<double, 5> up{1, u, u * u, u * u * u, u * u * u * u};
  std::array<double, 5> vp{1, v, v * v, v * v * v, v * v * v * v};
  Jet j;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; a + b < 5; ++b) {
      const double c = p.c[a][b];
      if (c == 0.0) continue;
      j.value += c * up[a] * vp[b];
      if (order >= 1) {
        if (a >= 1) j.dx += c * a * up[a - 1] * vp[b];
        if (b >= 1) j.dy += c * b * up[a] * vp[b - 1];
      }
      if (order >= 2) {
        if (a >= 2) j.dxx += c * a * (a - 1) * up[a - 2] * vp[b];
        if (a >= 1 && b >= 1) j.dxy += c * a * b * up[a - 1] * vp[b - 1];
        if (b >= 2) j.dyy += c * b * (b - 1) * up[a] * vp[b - 2];
      }
    }
  }
  return j;
}

bool same_columns(const DirectionMatrix& a, const DirectionMatrix& b) {
  auto x = a.columns();
  auto y = b.columns();
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

}  // namespace

DirectionMatrix::DirectionMatrix(std::vector<IVec2> columns) : columns_(std::move(columns)) {
  if (columns_.size() < 2) throw std::invalid_argument("direction matrix needs at least 2 columns");
  for (const IVec2& c : columns_) {
    if (c.x == 0 && c.y == 0) throw std::invalid_argument("direction matrix has a zero column");
  }
  if (det2(columns_[0], columns_[1]) == 0) {
    throw std::invalid_argument("leading 2x2 block of the direction matrix is singular");
  }
}

DirectionMatrix DirectionMatrix::three_directional_quartic() {
  return DirectionMatrix({{1, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 1}, {1, 1}});
}

DirectionMatrix DirectionMatrix::two_directional_bicubic() {
  return DirectionMatrix({{1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}, {0, 1}});
}

DirectionMatrix DirectionMatrix::without_last() const {
  return DirectionMatrix(std::vector<IVec2>(columns_.begin(), columns_.end() - 1));
}

BoxSplineDescriptor analyze(const DirectionMatrix& directions) {
  const auto& cols = directions.columns();
  const std::size_t n = cols.size();
  if (n > 20) throw std::invalid_argument("analyze: too many columns");
  // rho: smallest number of removed columns leaving a matrix that does not span the plane
  int rho = static_cast<int>(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int removed = std::popcount(mask);
    if (removed >= rho) continue;
    std::vector<IVec2> rest;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(mask & (1u << k))) rest.push_back(cols[k]);
    }
    if (rank_of(rest) < 2) rho = removed;
  }
  std::vector<IVec2> sums;
  sums.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    IVec2 s{0, 0};
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) s = s + cols[k];
    }
    sums.push_back(s);
  }
  BoxSplineDescriptor d{directions, static_cast<int>(n) - 2, rho - 2, convex_hull(sums), 0, {}};
  std::int64_t twice_area = 0;
  for (std::size_t k = 0; k < d.support.size(); ++k) {
    twice_area += det2(d.support[k], d.support[(k + 1) % d.support.size()]);
  }
  d.support_area = Rational(twice_area, 2);
  IVec2 total{0, 0};
  for (const IVec2& c : cols) total = total + c;
  d.anchor = RVec2{Rational(total.x, 2), Rational(total.y, 2)};
  return d;
}

bool check_unimodular(const DirectionMatrix& directions) {
  const auto& cols = directions.columns();
  for (std::size_t a = 0; a < cols.size(); ++a) {
    for (std::size_t b = a + 1; b < cols.size(); ++b) {
      if (std::abs(det2(cols[a], cols[b])) > 1) return false;
    }
  }
  return true;
}

double evaluate_oracle(const DirectionMatrix& directions, double x, double y) {
  return oracle_rec(directions.columns(), directions.size(), x, y);
}

double evaluate_oracle(const BoxSplineDescriptor& d, double x, double y) {
  return evaluate_oracle(d.directions, x, y);
}

std::vector<MaskEntry> subdivision_mask(const BoxSplineDescriptor& d) {
  std::map<IVec2, std::int64_t> poly{{IVec2{0, 0}, 1}};
  for (const IVec2& xi : d.directions.columns()) {
    std::map<IVec2, std::int64_t> next;
    for (const auto& [k, c] : poly) {
      next[k] += c;
      next[k + xi] += c;
    }
    poly = std::move(next);
  }
  const std::int64_t denom = std::int64_t{1} << (d.directions.size() - 2);
  std::vector<MaskEntry> out;
  for (const auto& [k, c] : poly) out.push_back({k, Rational(c, denom)});
  std::sort(out.begin(), out.end(), [](const MaskEntry& a, const MaskEntry& b) {
    return a.offset.y != b.offset.y ? a.offset.y < b.offset.y : a.offset.x < b.offset.x;
  });
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  value += o.value;
  dx += o.dx;
  dy += o.dy;
  dxx += o.dxx;
  dxy += o.dxy;
  dyy += o.dyy;
  return *this;
}

Jet Jet::scaled(double s) const { return Jet{s * value, s * dx, s * dy, s * dxx, s * dxy, s * dyy}; }

namespace quartic {

const std::array<std::array<int, 17>, 17>& bezier_grid24() {
  static const std::array<std::array<int, 17>, 17> grid = {{
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 1, 2, 3, 4, 3, 2, 1, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 1, 3, 4, 6, 6, 4, 3, 1, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 1, 4, 6, 8, 10, 8, 6, 4, 1, 0, 0, 0, 0, 0},
      {0, 0, 0, 1, 3, 6, 10, 12, 12, 10, 6, 3, 1, 0, 0, 0, 0},
      {0, 0, 0, 0, 2, 4, 8, 12, 12, 12, 8, 4, 2, 0, 0, 0, 0},
      {0, 0, 0, 0, 1, 3, 6, 10, 12, 12, 10, 6, 3, 1, 0, 0, 0},
      {0, 0, 0, 0, 0, 1, 4, 6, 8, 10, 8, 6, 4, 1, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 1, 3, 4, 6, 6, 4, 3, 1, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 3, 2, 1, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
  }};
  return grid;
}

const std::vector<Cell>& support_cells() {
  static const std::vector<Cell> cells = [] {
    std::vector<Cell> out;
    const auto& polys = cell_polys();
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 4; ++i) {
        for (Orient o : {Orient::Lower, Orient::Upper}) {
          const Cell c{0, i, j, o};
          if (polys[slot(c)].in_support) out.push_back(c);
        }
      }
    }
    return out;
  }();
  return cells;
}

std::array<int, 15> bernstein24(const Cell& c) {
  std::array<int, 15> out{};
  if (!in_box(c)) return out;
  const auto& grid = bezier_grid24();
  const auto v = vertices(Cell{0, c.i, c.j, c.orient});
  int idx = 0;
  for (int e0 = 4; e0 >= 0; --e0) {
    for (int e1 = 4 - e0; e1 >= 0; --e1, ++idx) {
      const int e2 = 4 - e0 - e1;
      const int px = e0 * v[0].x + e1 * v[1].x + e2 * v[2].x;
      const int py = e0 * v[0].y + e1 * v[1].y + e2 * v[2].y;
      out[idx] = grid[py][px];
    }
  }
  return out;
}

Jet evaluate_on(const Cell& c, double x, double y, int order) {
  if (!in_box(c)) return {};
  const CellPoly& cp = cell_polys()[slot(c)];
  if (!cp.in_support) return {};
  return eval_poly(cp.p, x - c.i, y - c.j, order);
}

Jet evaluate(double x, double y, int order) {
  if (!(x > 0.0 && y > 0.0 && x < 4.0 && y < 4.0)) return {};
  return evaluate_on(locate(0, x, y), x, y, order);
}

Jet evaluate_fast(double h, IVec2 shift, double x, double y, int order) {
  Jet j = evaluate(x / h - shift.x, y / h - shift.y, order);
  const double ih = 1.0 / h;
  j.dx *= ih;
  j.dy *= ih;
  j.dxx *= ih * ih;
  j.dxy *= ih * ih;
  j.dyy *= ih * ih;
  return j;
}

}  // namespace quartic

double polynomial_reproduction_check(const BoxSplineDescriptor& d, int q) {
  const bool fast = same_columns(d.directions, DirectionMatrix::three_directional_quartic());
  int xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const IVec2& p : d.support) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int w = 2 * std::max(xmax - xmin, ymax - ymin);
  // translates whose support meets the window [0, w]^2
  std::vector<IVec2> shifts;
  for (int sy = -ymax; sy <= w - ymin; ++sy) {
    for (int sx = -xmax; sx <= w - xmin; ++sx) shifts.push_back({sx, sy});
  }
  auto basis = [&](IVec2 s, double x, double y) {
    return fast ? quartic::evaluate(x - s.x, y - s.y).value
                : evaluate_oracle(d.directions, x - s.x, y - s.y);
  };
  const int per = fast ? 6 : 3;
  std::vector<std::array<double, 2>> pts;
  for (int a = 0; a <= per * w; ++a) {
    for (int b = 0; b <= per * w; ++b) {
      pts.push_back({(a + 0.37) * w / (per * w + 1.0), (b + 0.61) * w / (per * w + 1.0)});
    }
  }
  Eigen::MatrixXd A(pts.size(), shifts.size());
  for (std::size_t r = 0; r < pts.size(); ++r) {
    for (std::size_t c = 0; c < shifts.size(); ++c) A(r, c) = basis(shifts[c], pts[r][0], pts[r][1]);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const double mid = 0.5 * w;
  double worst = 0.0;
  for (int a = 0; a <= q; ++a) {
    for (int b = 0; a + b <= q; ++b) {
      Eigen::VectorXd rhs(pts.size());
      for (std::size_t r = 0; r < pts.size(); ++r) {
        rhs(r) = std::pow((pts[r][0] - mid) / mid, a) * std::pow((pts[r][1] - mid) / mid, b);
      }
      const Eigen::VectorXd coef = qr.solve(rhs);
      const Eigen::VectorXd res = A * coef - rhs;
      for (std::size_t r = 0; r < pts.size(); ++r) {
        const double x = pts[r][0];
        const double y = pts[r][1];
        if (x > 0.25 * w && x < 0.75 * w && y > 0.25 * w && y < 0.75 * w) {
          worst = std::max(worst, std::abs(res(r)));
        }
      }
    }
  }
  return worst;
}

}  // namespace hibox
