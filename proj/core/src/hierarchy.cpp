#include "hibox/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hibox {

namespace {

const std::vector<MaskEntry>& quartic_mask() {
  static const std::vector<MaskEntry> mask =
      subdivision_mask(analyze(DirectionMatrix::three_directional_quartic()));
  return mask;
}

bool shift_less(int la, IVec2 a, int lb, IVec2 b) {
  if (la != lb) return la < lb;
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

void collect_pieces(const Region& D, const Cell& c, std::vector<Cell>& out) {
  switch (D.coverage(c)) {
    case Coverage::None:
      return;
    case Coverage::Full:
      out.push_back(c);
      return;
    case Coverage::Partial:
      for (const Cell& ch : children(c)) collect_pieces(D, ch, out);
      return;
  }
}

// false if part of the support inside D lies outside Rl
bool walk_support(const Region& D, const Region& Rl, const Region& Rn, const Cell& c, bool& nonempty,
                  bool& escapes) {
  const Coverage cd = D.coverage(c);
  if (cd == Coverage::None) return true;
  const Coverage cl = Rl.coverage(c);
  if (cd == Coverage::Full && cl == Coverage::Full) {
    nonempty = true;
    if (!escapes && Rn.coverage(c) != Coverage::Full) escapes = true;
    return true;
  }
  if (cl == Coverage::None) return false;
  for (const Cell& ch : children(c)) {
    if (!walk_support(D, Rl, Rn, ch, nonempty, escapes)) return false;
  }
  return true;
}

bool support_meets(const Region& R, int level, IVec2 s) {
  for (const Cell& c : support_of(level, s)) {
    if (R.coverage(c) != Coverage::None) return true;
  }
  return false;
}

}  // namespace

std::uint64_t shift_key(int level, IVec2 s) { return cell_key(Cell{level, s.x, s.y, Orient::Lower}); }

// ---------------------------------------------------------------------------

Hierarchy::Hierarchy(std::vector<Region> levels) : levels_(std::move(levels)) {
  if (levels_.empty() || levels_[0].empty()) throw std::invalid_argument("hierarchy has an empty domain");
}

const Region& Hierarchy::level(int l) const {
  if (l < 0 || l >= num_levels()) return empty_;
  return levels_[l];
}

// ---------------------------------------------------------------------------

bool closure_touches_boundary(const Region& domain, const Cell& c) {
  for (const IVec2& v : vertices(c)) {
    for (const Cell& s : vertex_star(c.level, v)) {
      if (domain.coverage(s) != Coverage::Full) return true;
    }
  }
  return false;
}

bool edge_on_boundary(const Region& domain, const Cell& c, int k) {
  return domain.coverage(edge_neighbors(c)[k]) == Coverage::None;
}

HierarchicalMesh::HierarchicalMesh(Hierarchy hierarchy, double h0) : hierarchy_(std::move(hierarchy)), h0_(h0) {
  if (!(h0 > 0.0)) throw std::invalid_argument("mesh scale must be positive");
  auto visit = [&](auto&& self, const Cell& c, int m) -> void {
    switch (region(m + 1).coverage(c)) {
      case Coverage::None:
        if (c.level < m) {
          for (const Cell& ch : children(c)) self(self, ch, m);
        } else {
          leaves_.push_back({c, m});
        }
        return;
      case Coverage::Full:
        self(self, c, m + 1);
        return;
      case Coverage::Partial:
        for (const Cell& ch : children(c)) self(self, ch, m);
        return;
    }
  };
  for (const Cell& c : domain().full_cells_at(0)) visit(visit, c, 0);
  std::sort(leaves_.begin(), leaves_.end(), [](const Leaf& a, const Leaf& b) { return cell_less(a.cell, b.cell); });
  for (std::size_t k = 0; k < leaves_.size(); ++k) {
    leaf_of_.emplace(cell_key(leaves_[k].cell), static_cast<int>(k));
    for (int e = 0; e < 3; ++e) {
      if (edge_on_boundary(domain(), leaves_[k].cell, e)) boundary_edges_.push_back({static_cast<int>(k), e});
    }
  }
}

double HierarchicalMesh::h(int level) const { return std::ldexp(h0_, -level); }

int HierarchicalMesh::leaf_index(const Cell& c) const {
  auto it = leaf_of_.find(cell_key(c));
  return it == leaf_of_.end() ? -1 : it->second;
}

int HierarchicalMesh::locate_leaf(const Vec2& p, double tol) const {
  const double x = p.x() / h0_;
  const double y = p.y() / h0_;
  auto min_bary = [](const Cell& c, double xs, double ys) {
    const auto b = barycentric(c, xs, ys);
    return std::min({b[0], b[1], b[2]});
  };
  const Cell first = locate(0, x, y);
  std::vector<Cell> candidates{first};
  for (const Cell& c : closure_neighborhood(first)) {
    if (c != first) candidates.push_back(c);
  }
  for (const Cell& start : candidates) {
    if (domain().coverage(start) == Coverage::None || min_bary(start, x, y) < -tol) continue;
    Cell c = start;
    for (;;) {
      const int idx = leaf_index(c);
      if (idx >= 0) return idx;
      if (c.level > kMaxLevel || domain().coverage(c) == Coverage::None) break;
      const double s = std::ldexp(1.0, c.level + 1);
      Cell best = children(c)[0];
      double best_b = -1e300;
      for (const Cell& ch : children(c)) {
        const double b = min_bary(ch, x * s, y * s);
        if (b > best_b) {
          best_b = b;
          best = ch;
        }
      }
      c = best;
    }
  }
  return -1;
}

HierarchicalMesh build_mesh(const Region& domain, const std::vector<Region>& refine, double h0, MeshReport* report) {
  MeshReport rep;
  if (domain.empty()) throw std::invalid_argument("empty level-0 domain");
  std::vector<Region> levels;
  {
    Region d;
    for (const Cell& c : domain.touched_cells_at(0)) d.insert(c);
    if (d.area() != domain.area()) rep.realigned = true;
    levels.push_back(std::move(d));
  }
  for (std::size_t k = 0; k < refine.size(); ++k) {
    const int l = static_cast<int>(k) + 1;
    Region aligned;
    for (const Cell& c : refine[k].stored_cells()) {
      if (c.level > l) {
        rep.realigned = true;
        aligned.insert(ancestor(c, l));
      } else {
        aligned.insert(c);
      }
    }
    Region clipped = aligned.intersect(levels.back());
    if (clipped.area() != aligned.area()) rep.nesting_completed = true;
    levels.push_back(std::move(clipped));
  }
  while (levels.size() > 1 && levels.back().empty()) {
    levels.pop_back();
    ++rep.dropped_levels;
  }
  if (report) *report = rep;
  return HierarchicalMesh(Hierarchy(std::move(levels)), h0);
}

// ---------------------------------------------------------------------------

std::array<Cell, 24> support_of(int level, IVec2 shift) {
  std::array<Cell, 24> out;
  const auto& rel = quartic::support_cells();
  for (std::size_t k = 0; k < 24; ++k) out[k] = Cell{level, rel[k].i + shift.x, rel[k].j + shift.y, rel[k].orient};
  return out;
}

std::array<IVec2, 12> shifts_over(const Cell& c) {
  std::array<IVec2, 12> out;
  std::size_t n = 0;
  for (const Cell& r : quartic::support_cells()) {
    if (r.orient == c.orient) out[n++] = IVec2{c.i - r.i, c.j - r.j};
  }
  return out;
}

std::vector<Cell> support_pieces(const Region& D, int level, IVec2 shift) {
  std::vector<Cell> out;
  for (const Cell& c : support_of(level, shift)) collect_pieces(D, c, out);
  return out;
}

bool is_active(const Hierarchy& H, int level, IVec2 shift) {
  const Region& D = H.domain();
  const Region& Rl = H.level(level);
  const Region& Rn = H.level(level + 1);
  bool nonempty = false;
  bool escapes = false;
  for (const Cell& c : support_of(level, shift)) {
    if (!walk_support(D, Rl, Rn, c, nonempty, escapes)) return false;
  }
  return nonempty && escapes;
}

// ---------------------------------------------------------------------------

HierarchicalBasis::HierarchicalBasis(Variant variant, std::vector<BasisFunction> functions, double h0,
                                     int num_levels)
    : variant_(variant), functions_(std::move(functions)), h0_(h0), num_levels_(num_levels) {
  term_index_.resize(num_levels_);
  for (std::size_t f = 0; f < functions_.size(); ++f) {
    const BasisFunction& bf = functions_[f];
    by_shift_.emplace(shift_key(bf.level, bf.shift), static_cast<int>(f));
    for (const Term& t : bf.terms) {
      if (t.level >= num_levels_) throw std::logic_error("basis term beyond the finest level");
      term_index_[t.level][shift_key(0, t.shift)].emplace_back(static_cast<int>(f), t.coef);
    }
  }
}

double HierarchicalBasis::h(int level) const { return std::ldexp(h0_, -level); }

std::vector<std::size_t> HierarchicalBasis::count_per_level() const {
  std::vector<std::size_t> n(num_levels_, 0);
  for (const auto& f : functions_) ++n[f.level];
  return n;
}

Vec2 HierarchicalBasis::anchor(std::size_t index) const {
  const auto& f = functions_.at(index);
  return Vec2(f.shift.x + 2, f.shift.y + 2) * h(f.level);
}

int HierarchicalBasis::find(int level, IVec2 shift) const {
  auto it = by_shift_.find(shift_key(level, shift));
  return it == by_shift_.end() ? -1 : it->second;
}

void HierarchicalBasis::evaluate_all(const Vec2& p, int order, std::vector<Contribution>& out) const {
  out.clear();
  for (int k = 0; k < num_levels_; ++k) {
    const auto& index = term_index_[k];
    if (index.empty()) continue;
    const double hk = h(k);
    const double x = p.x() / hk;
    const double y = p.y() / hk;
    const Cell c = locate(k, x, y);
    const double ih = 1.0 / hk;
    for (const IVec2& s : shifts_over(c)) {
      auto it = index.find(shift_key(0, s));
      if (it == index.end()) continue;
      Jet j = quartic::evaluate_on(Cell{0, c.i - s.x, c.j - s.y, c.orient}, x - s.x, y - s.y, order);
      j.dx *= ih;
      j.dy *= ih;
      j.dxx *= ih * ih;
      j.dxy *= ih * ih;
      j.dyy *= ih * ih;
      for (const auto& [fn, coef] : it->second) out.push_back({fn, j.scaled(coef)});
    }
  }
  std::sort(out.begin(), out.end(), [](const Contribution& a, const Contribution& b) { return a.function < b.function; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (w > 0 && out[w - 1].function == out[r].function) {
      out[w - 1].jet += out[r].jet;
    } else {
      out[w++] = out[r];
    }
  }
  out.resize(w);
}

Jet HierarchicalBasis::evaluate(const std::vector<double>& coefficients, const Vec2& p, int order) const {
  if (coefficients.size() != functions_.size()) {
    throw std::invalid_argument("coefficient vector size does not match the basis");
  }
  thread_local std::vector<Contribution> buf;
  evaluate_all(p, order, buf);
  Jet sum;
  for (const auto& c : buf) sum += c.jet.scaled(coefficients[c.function]);
  return sum;
}

Jet HierarchicalBasis::evaluate_function(std::size_t index, const Vec2& p, int order) const {
  Jet sum;
  for (const Term& t : functions_.at(index).terms) {
    sum += quartic::evaluate_fast(h(t.level), t.shift, p.x(), p.y(), order).scaled(t.coef);
  }
  return sum;
}

// ---------------------------------------------------------------------------

BasisFunction truncate(const BasisFunction& f, const Hierarchy& H) {
  if (!is_active(H, f.level, f.shift)) throw std::invalid_argument("truncate: function is not an HBox member");
  const Region& D = H.domain();
  std::vector<Term> current{{f.level, f.shift, 1.0}};
  std::vector<Term> done;
  bool removed_any = false;
  for (int k = f.level + 1; k < H.num_levels(); ++k) {
    const Region& Rk = H.level(k);
    std::map<std::pair<int, int>, double> kids;  // (y, x) -> coefficient
    for (const Term& t : current) {
      if (!support_meets(Rk, t.level, t.shift)) {
        done.push_back(t);
        continue;
      }
      for (const MaskEntry& e : quartic_mask()) {
        const IVec2 s{2 * t.shift.x + e.offset.x, 2 * t.shift.y + e.offset.y};
        kids[{s.y, s.x}] += t.coef * boost::rational_cast<double>(e.coef);
      }
    }
    current.clear();
    for (const auto& [yx, coef] : kids) {
      const IVec2 s{yx.second, yx.first};
      const auto pieces = support_pieces(D, k, s);
      if (pieces.empty()) continue;
      const bool inside = std::all_of(pieces.begin(), pieces.end(), [&](const Cell& c) { return Rk.contains(c); });
      if (inside) {
        removed_any = true;
      } else {
        current.push_back({k, s, coef});
      }
    }
  }
  done.insert(done.end(), current.begin(), current.end());
  std::sort(done.begin(), done.end(),
            [](const Term& a, const Term& b) { return shift_less(a.level, a.shift, b.level, b.shift); });
  BasisFunction out = f;
  out.truncated = removed_any;
  out.terms = std::move(done);
  return out;
}

Region function_support(const BasisFunction& f, const Region& D) {
  Region r;
  for (const Term& t : f.terms) {
    for (const Cell& c : support_pieces(D, t.level, t.shift)) r.insert(c);
  }
  return r;
}

HierarchicalBasis hbox_basis(const Hierarchy& H, double h0) {
  std::vector<BasisFunction> fns;
  for (int l = 0; l < H.num_levels(); ++l) {
    std::vector<IVec2> cand;
    for (const Cell& c : H.level(l).touched_cells_at(l)) {
      for (const IVec2& s : shifts_over(c)) cand.push_back(s);
    }
    std::sort(cand.begin(), cand.end(), [](IVec2 a, IVec2 b) { return shift_less(0, a, 0, b); });
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (const IVec2& s : cand) {
      if (is_active(H, l, s)) fns.push_back(BasisFunction{l, s, false, {Term{l, s, 1.0}}});
    }
  }
  return HierarchicalBasis(Variant::HBox, std::move(fns), h0, H.num_levels());
}

HierarchicalBasis thbox_basis(const Hierarchy& H, double h0) {
  const HierarchicalBasis plain = hbox_basis(H, h0);
  std::vector<BasisFunction> fns;
  fns.reserve(plain.size());
  for (const auto& f : plain.functions()) fns.push_back(truncate(f, H));
  return HierarchicalBasis(Variant::THBox, std::move(fns), h0, H.num_levels());
}

HierarchicalBasis hbox_basis(const HierarchicalMesh& mesh) { return hbox_basis(mesh.hierarchy(), mesh.h0()); }
HierarchicalBasis thbox_basis(const HierarchicalMesh& mesh) { return thbox_basis(mesh.hierarchy(), mesh.h0()); }

HierarchicalBasis make_basis(const Hierarchy& H, double h0, Variant v) {
  return v == Variant::HBox ? hbox_basis(H, h0) : thbox_basis(H, h0);
}

std::string export_mesh_level(const HierarchicalMesh& mesh, int level) {
  std::ostringstream os;
  for (const Cell& c : mesh.region(level).full_cells_at(level)) os << to_string(c) << '\n';
  return os.str();
}

std::string export_basis(const HierarchicalBasis& basis) {
  std::ostringstream os;
  for (const auto& f : basis.functions()) {
    os << f.level << ' ' << f.shift.x << ' ' << f.shift.y << ' ' << (f.truncated ? "truncated" : "plain") << '\n';
  }
  return os.str();
}

}  // namespace hibox
