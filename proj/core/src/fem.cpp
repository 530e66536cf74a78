#include "hibox/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "hibox/quadrature.hpp"

namespace hibox {

namespace {

using Triplet = Eigen::Triplet<double>;

// Triplet buffer flushed into a running sum to bound memory.
class Accumulator {
 public:
  Accumulator(int rows, int cols) : sum_(rows, cols) {}
  void add(int r, int c, double v) {
    if (v == 0.0) return;
    buf_.emplace_back(r, c, v);
    if (buf_.size() >= (1u << 22)) flush();
  }
  SparseMatrix finish() {
    flush();
    sum_.makeCompressed();
    return std::move(sum_);
  }

 private:
  void flush() {
    if (buf_.empty()) return;
    SparseMatrix part(sum_.rows(), sum_.cols());
    part.setFromTriplets(buf_.begin(), buf_.end());
    sum_ += part;
    buf_.clear();
  }
  SparseMatrix sum_;
  std::vector<Triplet> buf_;
};

// Functions touching one leaf, with local dense blocks.
struct Local {
  std::vector<int> ids;
  int slot(int fn) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] == fn) return static_cast<int>(k);
    }
    ids.push_back(fn);
    return static_cast<int>(ids.size()) - 1;
  }
};

Vec2 leaf_point(const HierarchicalMesh& mesh, const Cell& c, const std::array<double, 3>& b) {
  const auto v = vertices(c);
  const double sc = mesh.h0() * std::ldexp(1.0, -c.level);
  return {sc * (b[0] * v[0].x + b[1] * v[1].x + b[2] * v[2].x), sc * (b[0] * v[0].y + b[1] * v[1].y + b[2] * v[2].y)};
}

double leaf_area(const HierarchicalMesh& mesh, const Cell& c) {
  const double sc = mesh.h0() * std::ldexp(1.0, -c.level);
  return 0.5 * sc * sc;
}

// Parametric points and weights per leaf.
class LeafRule {
 public:
  LeafRule(const HierarchicalMesh& mesh, const GeometryMap& map) : mesh_(mesh), singular_(map.singular_points()) {
    const GaussRule g = gauss_legendre(8);
    for (std::size_t a = 0; a < g.nodes.size(); ++a) {
      for (std::size_t b = 0; b < g.nodes.size(); ++b) {
        duffy_.push_back({g.nodes[a], g.nodes[b], g.weights[a] * g.weights[b]});
      }
    }
  }

  const std::vector<std::pair<Vec2, double>>& points(int leaf) {
    pts_.clear();
    const Cell& c = mesh_.leaves()[leaf].cell;
    const double area = leaf_area(mesh_, c);
    const auto v = vertices(c);
    const double sc = mesh_.h0() * std::ldexp(1.0, -c.level);
    std::array<Vec2, 3> P;
    for (int k = 0; k < 3; ++k) P[k] = Vec2(sc * v[k].x, sc * v[k].y);
    for (int k = 0; k < 3; ++k) {
      for (const Vec2& s : singular_) {
        if ((P[k] - s).norm() > 1e-14) continue;
        // collapse the square onto the triangle at vertex k
        const Vec2 e1 = P[(k + 1) % 3] - P[k], e2 = P[(k + 2) % 3] - P[(k + 1) % 3];
        for (const auto& [u, t, w] : duffy_) pts_.emplace_back(P[k] + u * (e1 + t * e2), w * u * 2 * area);
        return pts_;
      }
    }
    const TriangleRule& rule = triangle_rule_degree8();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      pts_.emplace_back(leaf_point(mesh_, c, rule.bary[q]), rule.weights[q] * area);
    }
    return pts_;
  }

 private:
  const HierarchicalMesh& mesh_;
  std::vector<Vec2> singular_;
  std::vector<std::array<double, 3>> duffy_;
  std::vector<std::pair<Vec2, double>> pts_;
};

double rel(const Vector& r, double scale) { return r.norm() / std::max(scale, 1e-300); }

void residuals(const BlockSystem& sys, Solution& s) {
  const Vector ru = sys.rhs_u();
  const Vector r1 = sys.uu() * s.U + sys.us() * s.Sigma - ru;
  const Vector r2 = sys.su() * s.U + sys.Kss * s.Sigma - sys.gsg;
  s.residual_u = rel(r1, ru.norm() + (sys.uu() * s.U).norm());
  s.residual_sigma = rel(r2, sys.gsg.norm() + (sys.Kss * s.Sigma).norm());
}

}  // namespace

void ProblemSpec::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (!(delta >= 0.0)) throw std::invalid_argument("SUPG parameter must be non-negative");
  if (!f || !g) throw std::invalid_argument("source and boundary data must be set");
  if (boundary_points < 1) throw std::invalid_argument("boundary quadrature needs at least one point");
}

std::vector<VolumePoint> volume_quadrature(const HierarchicalMesh& mesh, const GeometryMap& map) {
  std::vector<VolumePoint> out;
  out.reserve(mesh.leaves().size() * triangle_rule_degree8().weights.size());
  LeafRule rule(mesh, map);
  for (std::size_t k = 0; k < mesh.leaves().size(); ++k) {
    for (const auto& [p, w] : rule.points(static_cast<int>(k))) {
      VolumePoint vp;
      vp.param = p;
      const MapSample m = map.sample(p, 1);
      vp.x = m.x;
      vp.weight = w * std::abs(m.det());
      vp.leaf = static_cast<int>(k);
      out.push_back(vp);
    }
  }
  return out;
}

SparseMatrix BlockSystem::full() const {
  const int n = nh, m = 2 * mh;
  std::vector<Triplet> t;
  auto put = [&t](const SparseMatrix& A, int r0, int c0) {
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    }
  };
  put(uu(), 0, 0);
  put(us(), 0, n);
  put(su(), n, 0);
  put(Kss, n, n);
  SparseMatrix A(n + m, n + m);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

BlockSystem assemble(const ProblemSpec& problem, const HierarchicalMesh& mesh, const HierarchicalBasis& V,
                     const BoundaryStrip& strip, const HierarchicalBasis& W, const GeometryMap& map) {
  problem.validate();
  const int n = static_cast<int>(V.size());
  const int m = static_cast<int>(W.size());
  const double kappa = problem.kappa, eta = problem.effective_eta(), delta = problem.delta;
  const Vec2 a = problem.a;
  const double flux_sign = problem.flipped_flux_signs ? -1.0 : 1.0;
  const bool supg = delta > 0.0;

  BlockSystem sys;
  sys.nh = n;
  sys.mh = m;
  Accumulator K(n, n), A(n, n), Kin(n, n), G(n, n), S1(n, n), S2(n, n);
  Accumulator Kus(n, 2 * m), Gus(n, 2 * m), Ksu(2 * m, n), Gsu(2 * m, n), Kss(2 * m, 2 * m);
  sys.f = Vector::Zero(n);
  sys.gug = Vector::Zero(n);
  sys.sf = Vector::Zero(n);
  sys.gsg = Vector::Zero(2 * m);

  std::vector<char> in_strip(mesh.leaves().size(), 0);
  for (int k : strip_leaves(mesh, strip)) in_strip[k] = 1;

  LeafRule rule(mesh, map);
  std::vector<HierarchicalBasis::Contribution> cv, cw;
  std::vector<Jet> phys;
  Local lu, ls;
  Eigen::MatrixXd mK, mA, mKin, mS1, mS2, mKus, mKss;
  constexpr int kMax = 64;

  for (std::size_t leaf = 0; leaf < mesh.leaves().size(); ++leaf) {
    const Cell& c = mesh.leaves()[leaf].cell;
    const bool strip_leaf = in_strip[leaf] != 0;
    lu.ids.clear();
    ls.ids.clear();
    mK.setZero(kMax, kMax);
    mA.setZero(kMax, kMax);
    mS1.setZero(kMax, kMax);
    mS2.setZero(kMax, kMax);
    if (strip_leaf) {
      mKin.setZero(kMax, kMax);
      mKus.setZero(kMax, 2 * kMax);
      mKss.setZero(kMax, kMax);
    }
    for (const auto& [p, wp] : rule.points(static_cast<int>(leaf))) {
      const MapSample ms = map.sample(p, supg ? 2 : 1);
      const double det = ms.det();
      if (!(det > 0.0)) throw std::domain_error("non-positive Jacobian determinant at leaf " + to_string(c));
      const double w = wp * det;
      V.evaluate_all(p, supg ? 2 : 1, cv);
      if (cv.empty()) throw std::logic_error("quadrature point outside every basis support at " + to_string(c));
      phys.resize(cv.size());
      std::vector<int> slot(cv.size());
      for (std::size_t i = 0; i < cv.size(); ++i) {
        phys[i] = push_forward(cv[i].jet, ms);
        slot[i] = lu.slot(cv[i].function);
        if (slot[i] >= kMax) throw std::logic_error("too many functions on one leaf");
      }
      const double fx = problem.f(ms.x);
      for (std::size_t i = 0; i < cv.size(); ++i) {
        const Jet& vi = phys[i];
        const double adv_i = a.x() * vi.dx + a.y() * vi.dy;
        sys.f[cv[i].function] += w * fx * vi.value;
        if (supg) sys.sf[cv[i].function] += delta * w * fx * adv_i;
        for (std::size_t j = 0; j < cv.size(); ++j) {
          const Jet& uj = phys[j];
          const double adv_j = a.x() * uj.dx + a.y() * uj.dy;
          const double grad = vi.dx * uj.dx + vi.dy * uj.dy;
          mK(slot[i], slot[j]) += kappa * w * grad;
          mA(slot[i], slot[j]) += w * adv_j * vi.value;
          if (supg) {
            mS1(slot[i], slot[j]) += delta * w * (-kappa * (uj.dxx + uj.dyy)) * adv_i;
            mS2(slot[i], slot[j]) += delta * w * adv_j * adv_i;
          }
          if (strip_leaf) mKin(slot[i], slot[j]) += -(kappa / eta) * w * grad;
        }
      }
      if (!strip_leaf) continue;
      W.evaluate_all(p, 0, cw);
      std::vector<int> wslot(cw.size());
      for (std::size_t j = 0; j < cw.size(); ++j) {
        wslot[j] = ls.slot(cw[j].function);
        if (wslot[j] >= kMax) throw std::logic_error("too many flux functions on one leaf");
      }
      for (std::size_t j = 0; j < cw.size(); ++j) {
        const double psi = cw[j].jet.value;
        for (std::size_t i = 0; i < cv.size(); ++i) {
          mKus(slot[i], wslot[j]) += w / eta * psi * phys[i].dx;
          mKus(slot[i], kMax + wslot[j]) += w / eta * psi * phys[i].dy;
        }
        for (std::size_t k = 0; k < cw.size(); ++k) {
          mKss(wslot[j], wslot[k]) += -w / (eta * kappa) * psi * cw[k].jet.value;
        }
      }
    }
    const int nu = static_cast<int>(lu.ids.size()), nw = static_cast<int>(ls.ids.size());
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nu; ++j) {
        K.add(lu.ids[i], lu.ids[j], mK(i, j));
        A.add(lu.ids[i], lu.ids[j], mA(i, j));
        if (supg) {
          S1.add(lu.ids[i], lu.ids[j], mS1(i, j));
          S2.add(lu.ids[i], lu.ids[j], mS2(i, j));
        }
        if (strip_leaf) Kin.add(lu.ids[i], lu.ids[j], mKin(i, j));
      }
    }
    if (!strip_leaf) continue;
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nw; ++j) {
        for (int d = 0; d < 2; ++d) {
          const double v = mKus(i, d * kMax + j);
          Kus.add(lu.ids[i], d * m + ls.ids[j], v);
          Ksu.add(d * m + ls.ids[j], lu.ids[i], flux_sign * v);
        }
      }
    }
    for (int j = 0; j < nw; ++j) {
      for (int k = 0; k < nw; ++k) {
        for (int d = 0; d < 2; ++d) Kss.add(d * m + ls.ids[j], d * m + ls.ids[k], mKss(j, k));
      }
    }
  }

  for (const BoundaryPoint& bp : boundary_quadrature(map, mesh, problem.boundary_points)) {
    V.evaluate_all(bp.param, 0, cv);
    W.evaluate_all(bp.param, 0, cw);
    if (cw.empty()) throw std::logic_error("boundary point outside the flux basis supports");
    const double alpha = problem.alpha(bp.normal);
    const double gx = problem.g(bp.x);
    for (const auto& vi : cv) {
      const double phi = vi.jet.value;
      if (alpha > 0.0) {
        sys.gug[vi.function] += 0.5 * alpha * bp.weight * gx * phi;
        for (const auto& uj : cv) G.add(vi.function, uj.function, 0.5 * alpha * bp.weight * phi * uj.jet.value);
      }
      for (const auto& wj : cw) {
        for (int d = 0; d < 2; ++d) {
          const double v = -bp.weight * wj.jet.value * bp.normal[d] * phi;
          Gus.add(vi.function, d * m + wj.function, v);
          Gsu.add(d * m + wj.function, vi.function, v);
        }
      }
    }
    for (const auto& wj : cw) {
      for (int d = 0; d < 2; ++d) sys.gsg[d * m + wj.function] += -bp.weight * gx * wj.jet.value * bp.normal[d];
    }
  }

  sys.Kuu = K.finish();
  sys.Auu = A.finish();
  sys.Kin = Kin.finish();
  sys.Guu = G.finish();
  sys.S1 = S1.finish();
  sys.S2 = S2.finish();
  sys.Kus = Kus.finish();
  sys.Gus = Gus.finish();
  sys.Ksu = Ksu.finish();
  sys.Gsu = Gsu.finish();
  sys.Kss = Kss.finish();
  return sys;
}

Solution schur_solve(const BlockSystem& sys) {
  const int n = sys.nh, m2 = 2 * sys.mh;
  Eigen::SimplicialLDLT<SparseMatrix> mass;
  const SparseMatrix negKss = -sys.Kss;
  mass.compute(negKss);
  if (mass.info() != Eigen::Success || m2 == 0 || (mass.vectorD().array() <= 0.0).any()) {
    throw std::runtime_error("flux block K_ss is singular (empty flux basis on a strip cell?)");
  }
  const SparseMatrix B = sys.us();
  const SparseMatrix C = sys.su();

  // columns of C and rows of B that couple to the flux
  std::vector<int> cols, rows;
  {
    std::vector<char> cc(n, 0), rr(n, 0);
    for (int k = 0; k < C.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(C, k); it; ++it) cc[it.col()] = 1;
    }
    for (int k = 0; k < B.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(B, k); it; ++it) rr[it.row()] = 1;
    }
    for (int i = 0; i < n; ++i) {
      if (cc[i]) cols.push_back(i);
      if (rr[i]) rows.push_back(i);
    }
  }
  std::vector<int> row_pos(n, -1), col_pos(n, -1);
  for (std::size_t k = 0; k < rows.size(); ++k) row_pos[rows[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < cols.size(); ++k) col_pos[cols[k]] = static_cast<int>(k);
  Eigen::MatrixXd Cc = Eigen::MatrixXd::Zero(m2, cols.size());
  for (int k = 0; k < C.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(C, k); it; ++it) Cc(it.row(), col_pos[it.col()]) += it.value();
  }
  Eigen::MatrixXd Br = Eigen::MatrixXd::Zero(rows.size(), m2);
  for (int k = 0; k < B.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) Br(row_pos[it.row()], it.col()) += it.value();
  }
  // K_ss^{-1} = -negKss^{-1}
  const Eigen::MatrixXd Y = -mass.solve(Cc);
  const Eigen::MatrixXd BY = Br * Y;
  const Vector yg = -mass.solve(sys.gsg);

  std::vector<Triplet> t;
  const SparseMatrix uu = sys.uu();
  for (int k = 0; k < uu.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(uu, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (BY(i, j) != 0.0) t.emplace_back(rows[i], cols[j], -BY(i, j));
    }
  }
  SparseMatrix R(n, n);
  R.setFromTriplets(t.begin(), t.end());
  R.makeCompressed();
  const Vector rhs = sys.rhs_u() - B * yg;

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(R);
  lu.factorize(R);
  if (lu.info() != Eigen::Success) throw std::runtime_error("reduced system is singular: " + lu.lastErrorMessage());
  Solution s;
  s.U = lu.solve(rhs);
  s.Sigma = -mass.solve(sys.gsg - C * s.U);
  s.method = "schur";
  residuals(sys, s);
  return s;
}

Solution monolithic_solve(const BlockSystem& sys) {
  SparseMatrix A = sys.full();
  A.makeCompressed();
  Vector rhs(sys.nh + 2 * sys.mh);
  rhs << sys.rhs_u(), sys.gsg;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("block system is singular: " + lu.lastErrorMessage());
  const Vector x = lu.solve(rhs);
  Solution s;
  s.U = x.head(sys.nh);
  s.Sigma = x.tail(2 * sys.mh);
  s.method = "monolithic";
  residuals(sys, s);
  return s;
}

Solution solve(const BlockSystem& sys, SolverKind kind) {
  switch (kind) {
    case SolverKind::Schur:
      return schur_solve(sys);
    case SolverKind::Monolithic:
      return monolithic_solve(sys);
    case SolverKind::Auto:
      break;
  }
  return 2 * sys.mh <= 1500 ? schur_solve(sys) : monolithic_solve(sys);
}

ErrorReport error_report(const std::vector<double>& U, const HierarchicalBasis& V, const HierarchicalMesh& mesh,
                         const GeometryMap& map, const Reference& reference) {
  if (!reference) throw std::invalid_argument("no reference solution");
  int finest = 0;
  for (const Leaf& l : mesh.leaves()) finest = std::max(finest, l.cell.level);
  const int g = finest + 2;
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<std::int64_t, std::int64_t>> grid;
  for (const Leaf& l : mesh.leaves()) {
    const int n = 1 << (g - l.cell.level);
    const auto v = vertices(l.cell);
    for (int b = 0; b <= n; ++b) {
      for (int a = 0; a + b <= n; ++a) {
        const std::int64_t X = std::int64_t(v[0].x) * n + a * (v[1].x - v[0].x) + b * (v[2].x - v[0].x);
        const std::int64_t Y = std::int64_t(v[0].y) * n + a * (v[1].y - v[0].y) + b * (v[2].y - v[0].y);
        const std::uint64_t key = (std::uint64_t(X + (1 << 30)) << 32) | std::uint64_t(Y + (1 << 30));
        if (seen.insert(key).second) grid.emplace_back(X, Y);
      }
    }
  }
  std::sort(grid.begin(), grid.end(), [](const auto& p, const auto& q) { return p.second != q.second ? p.second < q.second : p.first < q.first; });
  ErrorReport rep;
  const double sc = mesh.h0() * std::ldexp(1.0, -g);
  rep.field.reserve(grid.size());
  for (const auto& [X, Y] : grid) {
    const Vec2 p(sc * X, sc * Y);
    const Vec2 x = map.eval(p);
    const double uh = V.evaluate(U, p).value;
    const double e = std::abs(reference(p, x) - uh);
    rep.field.push_back({p, x, uh, e});
    rep.max_error = std::max(rep.max_error, e);
  }
  rep.samples = grid.size();
  for (const VolumePoint& vp : volume_quadrature(mesh, map)) {
    rep.max_error = std::max(rep.max_error, std::abs(reference(vp.param, vp.x) - V.evaluate(U, vp.param).value));
    ++rep.samples;
  }
  return rep;
}

std::string export_coo(const SparseMatrix& A) {
  std::ostringstream os;
  os.precision(17);
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
  return os.str();
}

}  // namespace hibox
