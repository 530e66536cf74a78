#include "hibox_app/render.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hibox_app/format.hpp"

namespace hibox::app {

namespace {

constexpr double kSize = 640.0;
constexpr double kMargin = 10.0;
const char* const kLevelFill[] = {"#dbe7f3", "#a9c8e6", "#6fa3d6", "#3a78b8", "#1d4f87", "#0d2d55"};

std::string num(double v) { return fmt(std::round(v * 1000.0) / 1000.0); }

struct Frame {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1, scale = 1;

  explicit Frame(const HierarchicalMesh* mesh) {
    if (mesh && !mesh->leaves().empty()) {
      x0 = y0 = INFINITY;
      x1 = y1 = -INFINITY;
      for (const Leaf& l : mesh->leaves()) {
        const double s = mesh->h0() * std::ldexp(1.0, -l.cell.level);
        for (const IVec2& v : vertices(l.cell)) {
          x0 = std::min(x0, v.x * s);
          x1 = std::max(x1, v.x * s);
          y0 = std::min(y0, v.y * s);
          y1 = std::max(y1, v.y * s);
        }
      }
    }
    scale = (kSize - 2 * kMargin) / std::max(x1 - x0, y1 - y0);
  }
  double X(double x) const { return kMargin + (x - x0) * scale; }
  double Y(double y) const { return kMargin + (y1 - y) * scale; }
  double width() const { return 2 * kMargin + (x1 - x0) * scale; }
  double height() const { return 2 * kMargin + (y1 - y0) * scale; }
};

std::string header(const Frame& f) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(f.width()) + "\" height=\"" + num(f.height()) + "\" viewBox=\"0 0 " + num(f.width()) + " " +
         num(f.height()) + "\">\n";
}

std::string points(const Frame& f, const HierarchicalMesh& mesh, const Cell& c) {
  const double s = mesh.h0() * std::ldexp(1.0, -c.level);
  std::string out;
  for (const IVec2& v : vertices(c)) {
    if (!out.empty()) out += ' ';
    out += num(f.X(v.x * s)) + "," + num(f.Y(v.y * s));
  }
  return out;
}

std::string marker(int level, double x, double y, double r) {
  const std::string cls = "class=\"anchor level-" + std::to_string(level) + "\"";
  switch (level) {
    case 0:
      return "<circle " + cls + " cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\"/>\n";
    case 1:
      return "<rect " + cls + " x=\"" + num(x - r) + "\" y=\"" + num(y - r) + "\" width=\"" + num(2 * r) +
             "\" height=\"" + num(2 * r) + "\"/>\n";
    case 2:
      return "<path " + cls + " d=\"M" + num(x) + " " + num(y - r) + " L" + num(x + r) + " " + num(y + r) + " L" +
             num(x - r) + " " + num(y + r) + " Z\"/>\n";
    default:
      return "<path " + cls + " d=\"M" + num(x) + " " + num(y - r) + " L" + num(x + r) + " " + num(y) + " L" +
             num(x) + " " + num(y + r) + " L" + num(x - r) + " " + num(y) + " Z\"/>\n";
  }
}

}  // namespace

std::string render_mesh_svg(const HierarchicalMesh* mesh, const HierarchicalBasis* basis) {
  const Frame f(mesh);
  std::string out = header(f);
  out += "<g id=\"cells\" stroke=\"#333333\" stroke-width=\"0.5\">\n";
  if (mesh) {
    for (const Leaf& l : mesh->leaves()) {
      const int k = std::min<int>(l.level, 5);
      out += "<polygon class=\"cell level-" + std::to_string(l.level) + "\" fill=\"" + kLevelFill[k] +
             "\" points=\"" + points(f, *mesh, l.cell) + "\"/>\n";
    }
  }
  out += "</g>\n";
  if (mesh && basis) {
    out += "<g id=\"anchors\" fill=\"#c0392b\" stroke=\"none\">\n";
    for (std::size_t k = 0; k < basis->size(); ++k) {
      const int level = basis->functions()[k].level;
      const Vec2 a = basis->anchor(k);
      const double r = std::max(1.0, 0.12 * mesh->h(level) * f.scale);
      out += marker(level, f.X(a.x()), f.Y(a.y()), r);
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_strip_svg(const HierarchicalMesh& mesh, const BoundaryStrip& strip) {
  const Frame f(&mesh);
  const auto in = strip_leaves(mesh, strip);
  const std::set<int> inside(in.begin(), in.end());
  std::string out = header(f);
  out += "<g id=\"cells\" stroke=\"#333333\" stroke-width=\"0.5\">\n";
  for (std::size_t k = 0; k < mesh.leaves().size(); ++k) {
    const Cell& c = mesh.leaves()[k].cell;
    if (inside.count(static_cast<int>(k))) {
      out += "<polygon class=\"strip\" fill=\"#f5b041\" points=\"" + points(f, mesh, c) + "\"/>\n";
    } else {
      out += "<polygon class=\"cell\" fill=\"none\" points=\"" + points(f, mesh, c) + "\"/>\n";
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace hibox::app
