#include "hibox/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hibox {

namespace {

constexpr std::int64_t kOffset = std::int64_t{1} << 28;
constexpr std::uint64_t kMask29 = (std::uint64_t{1} << 29) - 1;

void sort_unique(std::vector<Cell>& v) {
  std::sort(v.begin(), v.end(), cell_less);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void tessellate(const Cell& c, int level, std::vector<Cell>& out) {
  if (c.level == level) {
    out.push_back(c);
    return;
  }
  for (const Cell& ch : children(c)) tessellate(ch, level, out);
}

}  // namespace

bool cell_less(const Cell& a, const Cell& b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.j != b.j) return a.j < b.j;
  if (a.i != b.i) return a.i < b.i;
  return a.orient < b.orient;
}

std::uint64_t cell_key(const Cell& c) {
  const auto ui = static_cast<std::uint64_t>(c.i + kOffset) & kMask29;
  const auto uj = static_cast<std::uint64_t>(c.j + kOffset) & kMask29;
  return (static_cast<std::uint64_t>(c.level) << 59) |
         (static_cast<std::uint64_t>(c.orient) << 58) | (ui << 29) | uj;
}

Cell cell_from_key(std::uint64_t key) {
  Cell c;
  c.level = static_cast<int>(key >> 59);
  c.orient = static_cast<Orient>((key >> 58) & 1u);
  c.i = static_cast<int>(static_cast<std::int64_t>((key >> 29) & kMask29) - kOffset);
  c.j = static_cast<int>(static_cast<std::int64_t>(key & kMask29) - kOffset);
  return c;
}

std::array<Cell, 4> children(const Cell& c) {
  const int l = c.level + 1;
  const int i = 2 * c.i;
  const int j = 2 * c.j;
  if (c.orient == Orient::Lower) {
    return {Cell{l, i, j, Orient::Lower}, Cell{l, i + 1, j, Orient::Lower},
            Cell{l, i + 1, j + 1, Orient::Lower}, Cell{l, i + 1, j, Orient::Upper}};
  }
  return {Cell{l, i, j, Orient::Upper}, Cell{l, i, j + 1, Orient::Upper},
          Cell{l, i + 1, j + 1, Orient::Upper}, Cell{l, i, j + 1, Orient::Lower}};
}

Cell parent(const Cell& c) {
  if (c.level == 0) throw std::invalid_argument("parent of a level-0 cell");
  const int a = c.i & 1;
  const int b = c.j & 1;
  Orient o = c.orient;
  if (c.orient == Orient::Lower && a == 0 && b == 1) o = Orient::Upper;
  if (c.orient == Orient::Upper && a == 1 && b == 0) o = Orient::Lower;
  return Cell{c.level - 1, c.i >> 1, c.j >> 1, o};
}

Cell ancestor(const Cell& c, int level) {
  Cell a = c;
  while (a.level > level) a = parent(a);
  return a;
}

bool is_descendant_or_self(const Cell& c, const Cell& a) {
  return c.level >= a.level && ancestor(c, a.level) == a;
}

std::array<IVec2, 3> vertices(const Cell& c) {
  if (c.orient == Orient::Lower) {
    return {IVec2{c.i, c.j}, IVec2{c.i + 1, c.j}, IVec2{c.i + 1, c.j + 1}};
  }
  return {IVec2{c.i, c.j}, IVec2{c.i + 1, c.j + 1}, IVec2{c.i, c.j + 1}};
}

std::array<Cell, 3> edge_neighbors(const Cell& c) {
  const int l = c.level;
  if (c.orient == Orient::Lower) {
    return {Cell{l, c.i, c.j - 1, Orient::Upper}, Cell{l, c.i + 1, c.j, Orient::Upper},
            Cell{l, c.i, c.j, Orient::Upper}};
  }
  return {Cell{l, c.i, c.j, Orient::Lower}, Cell{l, c.i, c.j + 1, Orient::Lower},
          Cell{l, c.i - 1, c.j, Orient::Lower}};
}

std::array<Cell, 6> vertex_star(int level, IVec2 v) {
  return {Cell{level, v.x, v.y, Orient::Lower},         Cell{level, v.x - 1, v.y, Orient::Lower},
          Cell{level, v.x - 1, v.y - 1, Orient::Lower}, Cell{level, v.x, v.y, Orient::Upper},
          Cell{level, v.x, v.y - 1, Orient::Upper},     Cell{level, v.x - 1, v.y - 1, Orient::Upper}};
}

Cell locate(int level, double x, double y) {
  const double fi = std::floor(x);
  const double fj = std::floor(y);
  const double fx = x - fi;
  const double fy = y - fj;
  return Cell{level, static_cast<int>(fi), static_cast<int>(fj),
              fx > fy ? Orient::Lower : Orient::Upper};
}

std::array<double, 3> barycentric(const Cell& c, double x, double y) {
  const double u = x - c.i;
  const double v = y - c.j;
  if (c.orient == Orient::Lower) return {1.0 - u, u - v, v};
  return {1.0 - v, u, v - u};
}

std::vector<Cell> closure_neighborhood(const Cell& c) {
  std::vector<Cell> out;
  out.reserve(18);
  for (const IVec2& v : vertices(c)) {
    for (const Cell& s : vertex_star(c.level, v)) out.push_back(s);
  }
  sort_unique(out);
  return out;
}

std::string to_string(const Cell& c) {
  std::ostringstream os;
  os << c.level << ' ' << c.i << ' ' << c.j << ' ' << (c.orient == Orient::Lower ? 'L' : 'U');
  return os.str();
}

// ---------------------------------------------------------------------------

bool Region::stored(const Cell& c) const {
  return c.level < static_cast<int>(stored_.size()) && stored_[c.level].count(cell_key(c)) > 0;
}

bool Region::has_descendants(const Cell& c) const {
  return c.level < static_cast<int>(marked_.size()) && marked_[c.level].count(cell_key(c)) > 0;
}

void Region::add_stored(const Cell& c) {
  if (c.level > kMaxLevel) throw std::invalid_argument("cell level too deep");
  if (static_cast<int>(stored_.size()) <= c.level) {
    stored_.resize(c.level + 1);
    marked_.resize(c.level + 1);
  }
  stored_[c.level].insert(cell_key(c));
  Cell a = c;
  while (a.level > 0) {
    a = parent(a);
    ++marked_[a.level][cell_key(a)];
  }
  ++size_;
}

void Region::drop_stored(const Cell& c) {
  stored_[c.level].erase(cell_key(c));
  Cell a = c;
  while (a.level > 0) {
    a = parent(a);
    auto& m = marked_[a.level];
    auto it = m.find(cell_key(a));
    if (--it->second == 0) m.erase(it);
  }
  --size_;
}

void Region::remove_descendants(const Cell& c) {
  if (!has_descendants(c)) return;
  for (const Cell& ch : children(c)) {
    if (stored(ch)) {
      drop_stored(ch);
    } else {
      remove_descendants(ch);
    }
  }
}

void Region::insert(const Cell& c) {
  if (coverage(c) == Coverage::Full) return;
  remove_descendants(c);
  add_stored(c);
}

void Region::erase(const Cell& c) {
  for (int l = std::min<int>(c.level, static_cast<int>(stored_.size()) - 1); l >= 0; --l) {
    const Cell a = ancestor(c, l);
    if (!stored(a)) continue;
    drop_stored(a);
    Cell cur = a;
    while (cur.level < c.level) {
      Cell next = cur;
      for (const Cell& ch : children(cur)) {
        if (is_descendant_or_self(c, ch)) {
          next = ch;
        } else {
          add_stored(ch);
        }
      }
      cur = next;
    }
    return;
  }
  remove_descendants(c);
}

Coverage Region::coverage_below(const Cell& c) const {
  if (!has_descendants(c)) return Coverage::None;
  for (const Cell& ch : children(c)) {
    if (stored(ch)) continue;
    if (coverage_below(ch) != Coverage::Full) return Coverage::Partial;
  }
  return Coverage::Full;
}

Coverage Region::coverage(const Cell& c) const {
  if (size_ == 0) return Coverage::None;
  Cell a = c;
  for (;;) {
    if (stored(a)) return Coverage::Full;
    if (a.level == 0) break;
    a = parent(a);
  }
  return coverage_below(c);
}

int Region::max_stored_level() const {
  for (int l = static_cast<int>(stored_.size()) - 1; l >= 0; --l) {
    if (!stored_[l].empty()) return l;
  }
  return -1;
}

std::vector<Cell> Region::stored_cells() const {
  std::vector<Cell> out;
  out.reserve(size_);
  for (const auto& level : stored_) {
    for (std::uint64_t k : level) out.push_back(cell_from_key(k));
  }
  sort_unique(out);
  return out;
}

std::vector<Cell> Region::full_cells_at(int level) const {
  std::vector<Cell> out;
  std::vector<Cell> candidates;
  for (const auto& set : stored_) {
    for (std::uint64_t k : set) {
      const Cell c = cell_from_key(k);
      if (c.level <= level) {
        tessellate(c, level, out);
      } else {
        candidates.push_back(ancestor(c, level));
      }
    }
  }
  sort_unique(candidates);
  for (const Cell& c : candidates) {
    if (coverage_below(c) == Coverage::Full) out.push_back(c);
  }
  sort_unique(out);
  return out;
}

std::vector<Cell> Region::touched_cells_at(int level) const {
  std::vector<Cell> out;
  for (const auto& set : stored_) {
    for (std::uint64_t k : set) {
      const Cell c = cell_from_key(k);
      if (c.level <= level) {
        tessellate(c, level, out);
      } else {
        out.push_back(ancestor(c, level));
      }
    }
  }
  sort_unique(out);
  return out;
}

double Region::area() const {
  double a = 0.0;
  for (std::size_t l = 0; l < stored_.size(); ++l) {
    a += static_cast<double>(stored_[l].size()) * 0.5 * std::ldexp(1.0, -2 * static_cast<int>(l));
  }
  return a;
}

Region Region::intersect(const Region& other) const {
  Region out;
  std::vector<Cell> todo = stored_cells();
  while (!todo.empty()) {
    const Cell c = todo.back();
    todo.pop_back();
    switch (other.coverage(c)) {
      case Coverage::Full:
        out.insert(c);
        break;
      case Coverage::Partial:
        for (const Cell& ch : children(c)) todo.push_back(ch);
        break;
      case Coverage::None:
        break;
    }
  }
  return out;
}

Region Region::unite(const Region& other) const {
  Region out = *this;
  for (const Cell& c : other.stored_cells()) out.insert(c);
  return out;
}

bool Region::subset_of(const Region& other) const {
  for (const auto& set : stored_) {
    for (std::uint64_t k : set) {
      if (other.coverage(cell_from_key(k)) != Coverage::Full) return false;
    }
  }
  return true;
}

bool Region::same_set(const Region& other) const {
  return subset_of(other) && other.subset_of(*this);
}

}  // namespace hibox
