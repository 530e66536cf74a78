// One PASS/FAIL line per acceptance criterion.  Exit status is zero when the failing set equals
// the --expect-fail list, so a known failure stays visible without hiding a regression.
#include <CLI11.hpp>
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "../unit/fixtures.hpp"
#include "hibox/adapt.hpp"
#include "hibox/boxspline.hpp"
#include "hibox_app/format.hpp"
#include "hibox_app/pipeline.hpp"

using namespace hibox;
using namespace fixtures;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cache_dir;

// ---------------------------------------------------------------------------------------------

Outcome kernel_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = DirectionMatrix::three_directional_quartic();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-0.25, 4.25);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double x = u(rng), y = u(rng);
    worst = std::max(worst, std::abs(quartic::evaluate(x, y).value - evaluate_oracle(m, x, y)));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 60.0, "max |net - convolution| = " + sci(worst) + " over 10000 points, " + sci(t) + " s"};
}

Outcome mask_exact() {
  const auto mask = subdivision_mask(analyze(DirectionMatrix::three_directional_quartic()));
  const std::vector<std::vector<int>> rows = {{1, 2, 1}, {2, 6, 6, 2}, {1, 6, 10, 6, 1}, {2, 6, 6, 2}, {1, 2, 1}};
  std::vector<std::vector<int>> got(5);
  Rational sum(0), centre(0);
  bool integral = true, in_range = true;
  for (const auto& e : mask) {
    sum += e.coef;
    if (e.offset == IVec2{2, 2}) centre = e.coef;
    if ((e.coef * 16).denominator() != 1) integral = false;
    if (e.offset.y < 0 || e.offset.y > 4) {
      in_range = false;
      continue;
    }
    got[e.offset.y].push_back(static_cast<int>((e.coef * 16).numerator()));
  }
  const bool corners = [&] {
    for (IVec2 c : std::vector<IVec2>{{0, 0}, {2, 0}, {4, 2}, {4, 4}, {2, 4}, {0, 2}}) {
      bool ok = false;
      for (const auto& e : mask) ok = ok || (e.offset == c && e.coef == Rational(1, 16));
      if (!ok) return false;
    }
    return true;
  }();
  const bool pass = integral && in_range && got == rows && sum == Rational(4) && centre == Rational(10, 16) && corners;
  auto q = [](const Rational& r) {
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  };
  std::ostringstream d;
  d << mask.size() << " entries, centre " << q(centre) << ", sum " << q(sum)
    << (corners ? ", corners 1/16" : ", corners wrong");
  return {pass, d.str()};
}

Outcome partition_of_unity() {
  double worst = 0.0;
  // single level: integer translates
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng), y = u(rng);
    double s = 0.0;
    for (int a = -5; a <= 5; ++a)
      for (int b = -5; b <= 5; ++b) s += quartic::evaluate(x - a, y - b).value;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  const double single = worst;
  int meshes = 0;
  for (const auto& fx : regression_meshes()) {
    const auto tb = thbox_basis(fx.mesh);
    const std::vector<double> ones(tb.size(), 1.0);
    for (const Vec2& p : random_points(fx.mesh, 100, 2)) worst = std::max(worst, std::abs(tb.evaluate(ones, p).value - 1.0));
    ++meshes;
  }
  return {worst <= 1e-12 && meshes == 3,
          "single level " + sci(single) + ", THBox on " + std::to_string(meshes) + " meshes " + sci(worst)};
}

Eigen::MatrixXd collocation(const HierarchicalBasis& b, const std::vector<Vec2>& pts) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(b.size()));
  std::vector<HierarchicalBasis::Contribution> buf;
  for (std::size_t r = 0; r < pts.size(); ++r) {
    b.evaluate_all(pts[r], 0, buf);
    for (const auto& c : buf) A(static_cast<Eigen::Index>(r), c.function) = c.jet.value;
  }
  return A;
}

Outcome span_equality() {
  const auto fx = regression_meshes()[1];
  const auto hb = hbox_basis(fx.mesh);
  const auto tb = thbox_basis(fx.mesh);
  const auto pts = leaf_nodes(fx.mesh);
  const Eigen::MatrixXd Ah = collocation(hb, pts), At = collocation(tb, pts);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qh(Ah), qt(At);
  std::mt19937 rng(8);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = g(rng), b = g(rng), c = g(rng);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
      const double x = pts[r].x() / 8, y = pts[r].y() / 8;
      rhs(static_cast<Eigen::Index>(r)) = std::sin(a * x + b * y) + c * x * x * y;
    }
    worst = std::max(worst, (Ah * qh.solve(rhs) - At * qt.solve(rhs)).cwiseAbs().maxCoeff());
  }
  const bool full = qh.rank() == static_cast<Eigen::Index>(hb.size()) && qt.rank() == static_cast<Eigen::Index>(tb.size());
  return {full && fx.mesh.num_levels() == 2 && worst <= 1e-10,
          std::to_string(hb.size()) + " functions, " + std::to_string(pts.size()) + " nodes, max fit difference " + sci(worst)};
}

Outcome quarter_circle_dof() {
  app::RunConfig cfg;
  cfg.preset = "quarter_circle";
  cfg.levels = 4;
  cfg.mode = "uniform";
  const auto u = app::dof_report(cfg);
  cfg.mode = "predefined";
  const auto h = app::dof_report(cfg);
  const std::vector<std::size_t> tu = {33, 75, 207, 663}, th = {33, 69, 111, 228}, ts = {33, 69, 104, 158};
  bool pass = true;
  std::string d = "uniform";
  for (int k = 0; k < 4; ++k) {
    pass = pass && u[k].dof == tu[k] && h[k].dof == th[k] && h[k].thbox == ts[k];
    d += " " + std::to_string(u[k].dof);
  }
  d += "; hierarchical";
  for (const auto& r : h) d += " " + std::to_string(r.dof);
  d += "; THBox strip";
  for (const auto& r : h) d += " " + std::to_string(r.thbox);
  return {pass, d};
}

Outcome quarter_circle_accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  app::RunConfig cfg;
  cfg.preset = "quarter_circle";
  cfg.levels = 4;
  cfg.mode = "uniform";
  const auto r = app::run(cfg);
  const std::vector<double> target = {1.85e-1, 4.48e-2, 4.18e-3, 1.52e-4};
  bool pass = r.rows.size() == 4;
  std::string d = "errors";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const double e = r.rows[k].max_error, q = e / target[k];
    pass = pass && q <= 3.0 && q >= 1.0 / 3.0;
    d += " " + sci(e);
  }
  const double order = std::log2(r.rows[2].max_error / r.rows[3].max_error);
  const double t = seconds_since(t0);
  pass = pass && order >= 3.5 && t < 300.0;
  return {pass, d + ", order " + sci(order) + ", " + sci(t) + " s"};
}

Outcome hexagon_convergence() {
  app::RunConfig cfg;
  cfg.preset = "hexagon";
  cfg.levels = 4;
  const auto r = app::run(cfg);
  const double e3 = r.rows[2].max_error, e4 = r.rows[3].max_error;
  return {e3 / e4 >= 10.0, "N=3 " + sci(e3) + ", N=4 " + sci(e4) + ", ratio " + sci(e3 / e4) + ", dof " +
                              std::to_string(r.rows[3].dof)};
}

// u = x^a y^b for every total degree <= 3 monomial.
Outcome patch_test() {
  std::vector<std::pair<std::string, HierarchicalMesh>> meshes;
  meshes.emplace_back("uniform", build_mesh(square(5), {}, 0.2));
  meshes.emplace_back("two-level", build_mesh(square(6), {cells_where(1, 6, [](double x, double y) { return x + y < 5; })},
                                              1.0 / 6));
  double worst = 0.0;
  int solves = 0;
  for (const auto& [name, mesh] : meshes) {
    for (StripKind kind : {StripKind::Fixed, StripKind::HBox, StripKind::THBox}) {
      for (Variant variant : {Variant::HBox, Variant::THBox}) {
        const auto V = make_basis(mesh.hierarchy(), mesh.h0(), variant);
        const auto strip = make_strip(mesh, kind);
        const auto W = strip_flux_basis(strip, mesh.h0(), variant);
        for (int a = 0; a <= 3; ++a) {
          for (int b = 0; a + b <= 3; ++b) {
            ProblemSpec ps;
            ps.g = [a, b](const Vec2& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); };
            ps.f = [a, b](const Vec2& x) {
              double l = 0.0;
              if (a > 1) l += a * (a - 1) * std::pow(x.x(), a - 2) * std::pow(x.y(), b);
              if (b > 1) l += b * (b - 1) * std::pow(x.x(), a) * std::pow(x.y(), b - 2);
              return -l;
            };
            const auto sol = solve(assemble(ps, mesh, V, strip, W, GeometryMap::identity()));
            const std::vector<double> U(sol.U.data(), sol.U.data() + sol.U.size());
            const auto rep = error_report(U, V, mesh, GeometryMap::identity(),
                                          [&](const Vec2&, const Vec2& x) { return ps.g(x); });
            worst = std::max(worst, rep.max_error);
            ++solves;
          }
        }
      }
    }
  }
  return {worst <= 1e-9, std::to_string(solves) + " solves, max error " + sci(worst)};
}

Outcome strip_chain() {
  std::vector<Fixture> all = regression_meshes();
  for (auto& f : boundary_meshes()) all.push_back(std::move(f));
  for (unsigned seed = 1; seed <= 5; ++seed) all.push_back(random_mesh(seed));
  bool chain = true, documented = true;
  std::string differ;
  for (const auto& fx : all) {
    const auto f = fixed_strip(fx.mesh);
    const auto h = hbox_strip(fx.mesh, hbox_basis(fx.mesh));
    const auto t = thbox_strip(fx.mesh, thbox_basis(fx.mesh));
    const auto a = remove_cells(f, fx.mesh);
    chain = chain && t.cells.subset_of(h.cells) && h.cells.subset_of(f.cells);
    if (!a.cells.same_set(t.cells)) {
      // counterexample: removal is strictly thinner and keeps every boundary leaf
      bool ok = a.cells.subset_of(t.cells);
      for (const Leaf& leaf : fx.mesh.leaves())
        if (closure_touches_boundary(fx.mesh.domain(), leaf.cell)) ok = ok && a.cells.contains(leaf.cell);
      documented = documented && ok;
      differ += (differ.empty() ? "" : ", ") + fx.name + " (" + sci(a.cells.area()) + " < " + sci(t.cells.area()) + ")";
    }
  }
  std::string d = "chain holds on " + std::to_string(all.size()) + " meshes";
  if (!chain) d = "chain broken";
  d += differ.empty() ? "; removal equals truncated-support strip everywhere"
                      : "; removal strictly inside truncated-support strip on " + differ;
  return {chain && documented, d};
}

Outcome advection() {
  const app::Preset p = app::make_preset("unit_square_advection");
  app::RunConfig cfg;
  cfg.preset = p.name;
  cfg.levels = 4;
  const auto r = app::run(cfg);
  bool bounded = true;
  for (const auto& row : r.rows) bounded = bounded && std::max(std::abs(row.vmax), std::abs(row.vmin)) <= 2.0;
  const auto& n2 = r.rows.at(1);
  const bool window = n2.vmax >= 1.0 && n2.vmax <= 1.35 && n2.vmin >= -0.15 && n2.vmin <= 0.0;

  // layer concentration of the refined cells over all steps
  AdaptiveOptions o;
  o.steps = 3;
  const auto steps = adaptive_loop([&](const HierarchicalMesh& m) { return p.problem(m, cfg); }, p.domain, p.h0, p.map, o);
  std::size_t near = 0, total = 0;
  for (const auto& s : steps) {
    for (std::size_t l = 0; l < s.plan.enlarged.size(); ++l) {
      const int lev = static_cast<int>(l);
      const double h = p.h0 * std::ldexp(1.0, -lev);
      for (const Cell& c : s.plan.enlarged[l].full_cells_at(lev)) {
        // only cells that were leaves before this step are newly refined
        if (lev + 1 < s.mesh.num_levels() && s.mesh.region(lev + 1).contains(c)) continue;
        const auto v = vertices(c);
        const double x = h * (v[0].x + v[1].x + v[2].x) / 3, y = h * (v[0].y + v[1].y + v[2].y) / 3;
        ++total;
        if (std::abs(y - x - 0.3) / std::sqrt(2.0) <= 3 * h) ++near;
      }
    }
  }
  const double frac = total ? static_cast<double>(near) / static_cast<double>(total) : 0.0;
  std::ostringstream d;
  d << "N=2 max " << sci(n2.vmax) << " min " << sci(n2.vmin) << (window ? " (in window)" : " (outside window)")
    << ", sup norm " << (bounded ? "<= 2" : "> 2") << " at all steps, " << near << "/" << total
    << " newly refined cells within 3h of the layer (" << sci(100 * frac) << "%, need >= 80%)";
  return {window && bounded && frac >= 0.8, d.str()};
}

Outcome reference_problems() {
  std::string d;
  bool pass = true;
  for (const std::string name : {"z_shape", "triangle_hole"}) {
    const auto t0 = std::chrono::steady_clock::now();
    app::RunConfig cfg;
    cfg.preset = name;
    cfg.levels = 4;
    cfg.reference_level = 6;
    cfg.cache_dir = cache_dir;
    const auto r = app::run(cfg);
    bool mono = true;
    for (std::size_t k = 1; k < r.rows.size(); ++k) mono = mono && r.rows[k].max_error < r.rows[k - 1].max_error;
    cfg.mode = "uniform";
    const auto u = app::dof_report(cfg);
    const double ratio = static_cast<double>(r.rows[3].dof) / static_cast<double>(u[3].dof);
    pass = pass && mono && ratio <= 0.10;
    d += (d.empty() ? "" : "; ") + name + " errors";
    for (const auto& row : r.rows) d += " " + sci(row.max_error);
    d += std::string(mono ? " (monotone)" : " (not monotone)") + ", dof " + std::to_string(r.rows[3].dof) + "/" +
         std::to_string(u[3].dof) + " = " + sci(ratio) + ", " + sci(seconds_since(t0)) + " s";
  }
  return {pass, d};
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / ("hibox-acceptance-" + std::to_string(::getpid()));
  bool same = true;
  std::size_t files = 0;
  for (const std::string name : {"quarter_circle", "unit_square_advection"}) {
    app::RunConfig cfg;
    cfg.preset = name;
    cfg.levels = 3;
    for (int k = 0; k < 2; ++k) app::write_artifacts(app::run(cfg), (base / (name + std::to_string(k))).string());
    for (const auto& e : fs::directory_iterator(base / (name + "0"))) {
      if (e.path().extension() != ".csv") continue;
      auto slurp = [](const fs::path& f) {
        std::ifstream in(f, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      };
      same = same && slurp(e.path()) == slurp(base / (name + "1") / e.path().filename());
      ++files;
    }
  }
  fs::remove_all(base);
  return {same && files >= 4, std::to_string(files) + " CSV files compared byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"hibox acceptance checks"};
  std::vector<int> expect_fail, only;
  cache_dir = (fs::temp_directory_path() / "hibox-acceptance-cache").string();
  cli.add_option("--cache-dir", cache_dir, "reference solution cache");
  cli.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
  cli.add_option("--only", only, "run a subset")->delimiter(',');
  CLI11_PARSE(cli, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"kernel exactness", kernel_exactness},
      {"subdivision mask", mask_exact},
      {"partition of unity", partition_of_unity},
      {"HBox/THBox span equality", span_equality},
      {"quarter-circle dof", quarter_circle_dof},
      {"quarter-circle accuracy", quarter_circle_accuracy},
      {"hexagon convergence", hexagon_convergence},
      {"cubic patch test", patch_test},
      {"strip chain", strip_chain},
      {"advection-diffusion", advection},
      {"Z-shape and triangle-hole", reference_problems},
      {"determinism", determinism},
  };
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  const std::set<int> subset(only.begin(), only.end());
  std::set<int> failed;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!subset.empty() && !subset.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[k].first << ": " << o.detail
              << (!o.pass && expected.count(id) ? " [expected failure]" : "") << std::endl;
  }
  std::set<int> want;
  for (int id : expected)
    if (subset.empty() || subset.count(id)) want.insert(id);
  std::cout << failed.size() << " failing";
  if (failed == want) {
    std::cout << ", matching the expected set" << std::endl;
    return 0;
  }
  std::cout << ", expected " << want.size() << std::endl;
  return 1;
}
