#pragma once

#include <string>

#include "hibox/strip.hpp"

namespace hibox::app {

// One <polygon> per leaf, filled by level; anchors drawn with a level-dependent marker
// (circle, square, triangle, diamond, ...).  A null mesh gives an empty scaffold.
std::string render_mesh_svg(const HierarchicalMesh* mesh, const HierarchicalBasis* basis = nullptr);

// Strip leaves carry class "strip", the others class "cell" and no fill.
std::string render_strip_svg(const HierarchicalMesh& mesh, const BoundaryStrip& strip);

}  // namespace hibox::app
