#include "hibox/strip.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hibox {

namespace {

Hierarchy restrict_to(const HierarchicalMesh& mesh, const Region& cells) {
  std::vector<Region> levels{cells};
  for (int l = 1; l < mesh.num_levels(); ++l) levels.push_back(mesh.region(l).intersect(cells));
  return Hierarchy(std::move(levels));
}

BoundaryStrip finish(StripKind kind, Region cells, std::vector<Region> substrips, const HierarchicalMesh& mesh) {
  BoundaryStrip s;
  s.kind = kind;
  s.hierarchy = restrict_to(mesh, cells);
  s.cells = std::move(cells);
  s.substrips = std::move(substrips);
  return s;
}

BoundaryStrip support_strip(const HierarchicalMesh& mesh, const HierarchicalBasis& basis, StripKind kind) {
  const Region& D = mesh.domain();
  std::vector<Region> subs(mesh.num_levels());
  for (const BasisFunction& f : basis.functions()) {
    Region& sub = subs.at(f.level);
    Region trunc;
    if (f.truncated) trunc = function_support(f, D);
    for (const Cell& c : support_of(f.level, f.shift)) {
      if (sub.contains(c) || !D.contains(c) || !closure_touches_boundary(D, c)) continue;
      if (!f.truncated) {
        sub.insert(c);
        continue;
      }
      Region one;
      one.insert(c);
      for (const Cell& piece : trunc.intersect(one).stored_cells()) sub.insert(piece);
    }
  }
  Region cells;
  for (const Region& sub : subs) {
    for (const Cell& c : sub.stored_cells()) cells.insert(c);
  }
  return finish(kind, std::move(cells), std::move(subs), mesh);
}

}  // namespace

const char* to_string(StripKind k) {
  switch (k) {
    case StripKind::Fixed:
      return "fixed";
    case StripKind::HBox:
      return "hbox";
    case StripKind::THBox:
      return "thbox";
  }
  return "?";
}

StripKind strip_kind_from_string(const std::string& s) {
  if (s == "fixed") return StripKind::Fixed;
  if (s == "hbox") return StripKind::HBox;
  if (s == "thbox") return StripKind::THBox;
  throw std::invalid_argument("unknown strip kind '" + s + "'");
}

BoundaryStrip fixed_strip(const HierarchicalMesh& mesh) {
  Region cells;
  for (const Cell& c : mesh.domain().full_cells_at(0)) {
    if (closure_touches_boundary(mesh.domain(), c)) cells.insert(c);
  }
  return finish(StripKind::Fixed, std::move(cells), {}, mesh);
}

BoundaryStrip hbox_strip(const HierarchicalMesh& mesh, const HierarchicalBasis& hbasis) {
  return support_strip(mesh, hbasis, StripKind::HBox);
}

BoundaryStrip thbox_strip(const HierarchicalMesh& mesh, const HierarchicalBasis& thbasis) {
  return support_strip(mesh, thbasis, StripKind::THBox);
}

BoundaryStrip remove_cells(const BoundaryStrip& fixed, const HierarchicalMesh& mesh) {
  if (fixed.kind != StripKind::Fixed || !fixed.substrips.empty()) {
    throw std::invalid_argument("remove_cells expects a fixed strip");
  }
  const Region& D = mesh.domain();
  Region strip = fixed.cells;
  for (int l = 0; l < mesh.num_levels(); ++l) {
    const Region& Rl = mesh.region(l);
    for (const Cell& pi : Rl.intersect(strip).full_cells_at(l)) {
      if (closure_touches_boundary(D, pi)) continue;
      bool all_active = true;
      for (const IVec2& s : shifts_over(pi)) {
        for (const Cell& c : support_of(l, s)) {
          if (strip.touches(c) && !Rl.contains(c)) {
            all_active = false;
            break;
          }
        }
        if (!all_active) break;
      }
      if (all_active) strip.erase(pi);
    }
  }
  return finish(StripKind::THBox, std::move(strip), {}, mesh);
}

BoundaryStrip make_strip(const HierarchicalMesh& mesh, StripKind kind) {
  switch (kind) {
    case StripKind::Fixed:
      return fixed_strip(mesh);
    case StripKind::HBox:
      return hbox_strip(mesh, hbox_basis(mesh));
    case StripKind::THBox:
      return remove_cells(fixed_strip(mesh), mesh);
  }
  throw std::invalid_argument("bad strip kind");
}

HierarchicalBasis strip_flux_basis(const BoundaryStrip& strip, double h0, Variant variant) {
  return make_basis(strip.hierarchy, h0, variant);
}

std::vector<int> strip_leaves(const HierarchicalMesh& mesh, const BoundaryStrip& strip) {
  std::vector<int> out;
  for (std::size_t k = 0; k < mesh.leaves().size(); ++k) {
    if (strip.cells.contains(mesh.leaves()[k].cell)) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::string export_strip(const BoundaryStrip& strip) {
  std::ostringstream os;
  os << "strip " << to_string(strip.kind) << '\n';
  for (const Cell& c : strip.cells.stored_cells()) os << to_string(c) << '\n';
  return os.str();
}

}  // namespace hibox
