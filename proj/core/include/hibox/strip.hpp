#pragma once

#include <string>
#include <vector>

#include "hibox/hierarchy.hpp"

namespace hibox {

enum class StripKind { Fixed, HBox, THBox };

const char* to_string(StripKind k);
StripKind strip_kind_from_string(const std::string& s);

struct BoundaryStrip {
  StripKind kind = StripKind::Fixed;
  Region cells;
  // Per-level substrips; empty for the fixed strip.
  std::vector<Region> substrips;
  // R^l ∩ strip, l = 0..N-1.
  Hierarchy hierarchy;
};

// Level-0 cells whose closure meets the boundary, i.e. a band of thickness h0.
BoundaryStrip fixed_strip(const HierarchicalMesh& mesh);

// Union over levels of the boundary-touching level-l cells covered by supports of active level-l functions.
// Passing the HBox basis gives the HBox strip, the THBox basis the THBox strip.
BoundaryStrip hbox_strip(const HierarchicalMesh& mesh, const HierarchicalBasis& hbasis);
BoundaryStrip thbox_strip(const HierarchicalMesh& mesh, const HierarchicalBasis& thbasis);

// Cell-removal construction starting from the fixed strip.  Throws if `fixed` is not a fixed strip.
BoundaryStrip remove_cells(const BoundaryStrip& fixed, const HierarchicalMesh& mesh);

// THBox uses the cell-removal construction.
BoundaryStrip make_strip(const HierarchicalMesh& mesh, StripKind kind);

// Basis of the restricted hierarchy R^l ∩ strip.
HierarchicalBasis strip_flux_basis(const BoundaryStrip& strip, double h0, Variant variant);

// Indices of the mesh leaves inside the strip.
std::vector<int> strip_leaves(const HierarchicalMesh& mesh, const BoundaryStrip& strip);

// Header line "strip <kind>" followed by "level i j L|U" per stored cell.
std::string export_strip(const BoundaryStrip& strip);

}  // namespace hibox
