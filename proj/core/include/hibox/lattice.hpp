#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hibox {

// Integer lattice vector (shift or vertex index).
struct IVec2 {
  int x = 0;
  int y = 0;
  auto operator<=>(const IVec2&) const = default;
};

inline IVec2 operator+(IVec2 a, IVec2 b) { return {a.x + b.x, a.y + b.y}; }
inline IVec2 operator-(IVec2 a, IVec2 b) { return {a.x - b.x, a.y - b.y}; }

enum class Orient : std::uint8_t { Lower = 0, Upper = 1 };

// Triangle of the three-directional mesh at a given level.
// Lower(i,j): (i,j),(i+1,j),(i+1,j+1).  Upper(i,j): (i,j),(i,j+1),(i+1,j+1).
struct Cell {
  int level = 0;
  int i = 0;
  int j = 0;
  Orient orient = Orient::Lower;
  auto operator<=>(const Cell&) const = default;
};

constexpr int kMaxLevel = 24;

// Canonical ordering (level, j, i, orient).
bool cell_less(const Cell& a, const Cell& b);

std::uint64_t cell_key(const Cell& c);
Cell cell_from_key(std::uint64_t key);

std::array<Cell, 4> children(const Cell& c);
Cell parent(const Cell& c);
Cell ancestor(const Cell& c, int level);
bool is_descendant_or_self(const Cell& c, const Cell& a);

// Vertices in counter-clockwise order, in level lattice units.
std::array<IVec2, 3> vertices(const Cell& c);

// Neighbours across the three edges; edge k joins vertices[k] and vertices[k+1].
std::array<Cell, 3> edge_neighbors(const Cell& c);

// Six cells sharing lattice vertex v.
std::array<Cell, 6> vertex_star(int level, IVec2 v);

// Cell containing a point given in level lattice units.  Horizontal and
// vertical ties go to the larger index, diagonal ties to the Upper cell.
Cell locate(int level, double x, double y);

// Barycentric coordinates of a point (level lattice units) with respect to vertices(c).
std::array<double, 3> barycentric(const Cell& c, double x, double y);

// Cells of the same level whose closure shares at least a vertex with c (13 cells incl. c).
std::vector<Cell> closure_neighborhood(const Cell& c);

std::string to_string(const Cell& c);

enum class Coverage { None, Partial, Full };

// A union of triangles of mixed levels.
class Region {
 public:
  Region() = default;

  void insert(const Cell& c);
  void erase(const Cell& c);
  Coverage coverage(const Cell& c) const;
  bool contains(const Cell& c) const { return coverage(c) == Coverage::Full; }
  bool touches(const Cell& c) const { return coverage(c) != Coverage::None; }

  bool empty() const { return size_ == 0; }
  std::size_t stored_size() const { return size_; }
  int max_stored_level() const;

  // Stored cells sorted by (level, j, i, orient).
  std::vector<Cell> stored_cells() const;

  // All level-L cells contained in the region (cells stored above L tessellated).
  std::vector<Cell> full_cells_at(int level) const;
  // All level-L cells that overlap the region in positive area.
  std::vector<Cell> touched_cells_at(int level) const;

  // Area in level-0 lattice units.
  double area() const;

  Region intersect(const Region& other) const;
  Region unite(const Region& other) const;

  // Point-set equality.
  bool same_set(const Region& other) const;
  // Point-set inclusion: this ⊆ other.
  bool subset_of(const Region& other) const;

 private:
  Coverage coverage_below(const Cell& c) const;
  void remove_descendants(const Cell& c);
  void add_stored(const Cell& c);
  void drop_stored(const Cell& c);
  bool stored(const Cell& c) const;
  bool has_descendants(const Cell& c) const;

  std::vector<std::unordered_set<std::uint64_t>> stored_;
  std::vector<std::unordered_map<std::uint64_t, int>> marked_;
  std::size_t size_ = 0;
};

}  // namespace hibox
