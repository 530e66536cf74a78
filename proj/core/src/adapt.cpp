#include "hibox/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hibox {

std::vector<double> gradient_indicator(const std::vector<double>& U, const HierarchicalBasis& V,
                                       const GeometryMap& map, const HierarchicalMesh& mesh) {
  if (U.size() != V.size()) throw std::invalid_argument("coefficient count does not match the basis");
  std::vector<double> sq(mesh.leaves().size(), 0.0);
  for (const VolumePoint& q : volume_quadrature(mesh, map)) {
    const Jet local = V.evaluate(U, q.param, 1);
    const Jet g = push_forward(local, map.sample(q.param, 1));
    sq[q.leaf] += q.weight * (g.dx * g.dx + g.dy * g.dy);
  }
  for (double& v : sq) v = std::sqrt(v);
  return sq;
}

double ThresholdRule::resolve(const std::vector<double>& indicators) const {
  if (indicators.empty()) return 0.0;
  switch (kind) {
    case Kind::FractionOfMax:
      return value * *std::max_element(indicators.begin(), indicators.end());
    case Kind::Absolute:
      return value;
    case Kind::Quantile: {
      if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("quantile must lie in [0, 1]");
      std::vector<double> s = indicators;
      std::sort(s.begin(), s.end());
      return s[static_cast<std::size_t>(std::floor(value * static_cast<double>(s.size() - 1)))];
    }
  }
  return value;
}

ThresholdRule ThresholdRule::parse(const std::string& kind, double value) {
  ThresholdRule r;
  r.value = value;
  if (kind == "fraction") {
    r.kind = Kind::FractionOfMax;
  } else if (kind == "absolute") {
    r.kind = Kind::Absolute;
  } else if (kind == "quantile") {
    r.kind = Kind::Quantile;
  } else {
    throw std::invalid_argument("unknown threshold rule '" + kind + "'");
  }
  return r;
}

bool RefinementPlan::empty() const {
  for (const auto& m : marked)
    if (!m.empty()) return false;
  return true;
}

std::size_t RefinementPlan::marked_count() const {
  std::size_t n = 0;
  for (const auto& m : marked) n += m.size();
  return n;
}

int lattice_distance(IVec2 a, IVec2 b) {
  const int p = b.x - a.x, q = b.y - a.y;
  if ((p >= 0) == (q >= 0)) return std::max(std::abs(p), std::abs(q));
  return std::abs(p) + std::abs(q);
}

std::vector<Cell> dilate_cell(const Cell& c, const HierarchicalMesh& mesh, int level, int dilation) {
  if (c.level != level) throw std::invalid_argument("cell level does not match the dilation level");
  const auto cv = vertices(c);
  const Region& R = mesh.region(level);
  std::vector<Cell> out;
  const int r = dilation + 1;
  for (int j = c.j - r; j <= c.j + r; ++j) {
    for (int i = c.i - r; i <= c.i + r; ++i) {
      for (Orient o : {Orient::Lower, Orient::Upper}) {
        const Cell cand{level, i, j, o};
        bool near = true;
        for (const IVec2& v : vertices(cand)) {
          int d = 1 << 30;
          for (const IVec2& w : cv) d = std::min(d, lattice_distance(v, w));
          if (d > dilation) {
            near = false;
            break;
          }
        }
        if (near && R.contains(cand)) out.push_back(cand);
      }
    }
  }
  return out;
}

RefinementPlan mark_and_enlarge(const std::vector<double>& indicators, const HierarchicalMesh& mesh,
                                const ThresholdRule& rule, int dilation) {
  if (indicators.size() != mesh.leaves().size()) throw std::invalid_argument("one indicator per leaf expected");
  if (dilation < 0) throw std::invalid_argument("dilation must be non-negative");
  RefinementPlan plan;
  plan.threshold = rule.resolve(indicators);
  const int n = mesh.num_levels();
  plan.marked.assign(n, {});
  plan.enlarged.assign(n, Region{});
  for (std::size_t k = 0; k < indicators.size(); ++k) {
    if (!(indicators[k] > plan.threshold)) continue;
    const Leaf& leaf = mesh.leaves()[k];
    plan.marked[leaf.level].push_back(ancestor(leaf.cell, leaf.level));
  }
  for (int l = 0; l < n; ++l) {
    auto& m = plan.marked[l];
    std::sort(m.begin(), m.end(), cell_less);
    m.erase(std::unique(m.begin(), m.end()), m.end());
    for (const Cell& c : m)
      for (const Cell& d : dilate_cell(c, mesh, l, dilation)) plan.enlarged[l].insert(d);
  }
  return plan;
}

std::vector<Region> apply_plan(const HierarchicalMesh& mesh, const RefinementPlan& plan) {
  std::vector<Region> out;
  for (int l = 1; l < mesh.num_levels(); ++l) out.push_back(mesh.region(l));
  for (std::size_t l = 0; l < plan.enlarged.size(); ++l) {
    if (plan.enlarged[l].empty()) continue;
    if (out.size() <= l) out.resize(l + 1);
    out[l] = out[l].unite(plan.enlarged[l]);
  }
  return out;
}

std::vector<AdaptiveStep> adaptive_loop(const ProblemFactory& problem, const Region& domain, double h0,
                                        const GeometryMap& map, const AdaptiveOptions& options) {
  if (options.steps < 0) throw std::invalid_argument("steps must be non-negative");
  std::vector<AdaptiveStep> out;
  std::vector<Region> refine;
  for (int step = 0; step <= options.steps; ++step) {
    HierarchicalMesh mesh = build_mesh(domain, refine, h0);
    HierarchicalBasis V = make_basis(mesh.hierarchy(), h0, options.variant);
    BoundaryStrip strip = make_strip(mesh, options.strip);
    HierarchicalBasis W = strip_flux_basis(strip, h0, options.variant);
    const BlockSystem sys = assemble(problem(mesh), mesh, V, strip, W, map);
    Solution sol = solve(sys, options.solver);
    const std::vector<double> U(sol.U.data(), sol.U.data() + sol.U.size());
    std::vector<double> ind = gradient_indicator(U, V, map, mesh);
    RefinementPlan plan;
    if (step < options.steps) {
      plan = mark_and_enlarge(ind, mesh, options.rule, options.dilation);
      plan.step = step;
    }
    const bool stop = step == options.steps || plan.empty();
    if (!stop) refine = apply_plan(mesh, plan);
    out.push_back({std::move(mesh), std::move(V), std::move(strip), std::move(W), std::move(sol), std::move(ind),
                   std::move(plan)});
    if (stop) break;
  }
  return out;
}

}  // namespace hibox
