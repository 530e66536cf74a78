#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "hibox_app/config.hpp"
#include "hibox_app/format.hpp"
#include "hibox_app/pipeline.hpp"
#include "hibox_app/presets.hpp"
#include "hibox_app/render.hpp"
#include "fixtures.hpp"

using namespace hibox;
using namespace hibox::app;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hibox-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(1.0) == "1");
  CHECK(fmt(-2.5e-7) == "-2.5e-07");
  CHECK(fmt(42LL) == "42");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::strtod(fmt(v).c_str(), nullptr) == v);
  }
  CHECK(csv_line({"a", "1"}) == "a,1\n");
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a("foobar")) == "85944171f73967e8");
}

TEST_CASE("config parsing, validation and round trip") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  parse_config(cfg,
               "# comment\n"
               "problem.preset = quarter_circle\n"
               "run.levels = 2   # trailing\n"
               "\n"
               "run.strip = hbox\n"
               "adapt.threshold = 0.25\n"
               "output.svg = false\n");
  CHECK(cfg.preset == "quarter_circle");
  CHECK(cfg.levels == 2);
  CHECK(cfg.effective_variant() == "hbox");
  CHECK(cfg.threshold == 0.25);
  CHECK_FALSE(cfg.svg);
  CHECK(cfg.effective_mode() == "predefined");
  CHECK(cfg.effective_reference_level() == 4);

  RunConfig back;
  parse_config(back, serialize(cfg));
  CHECK(serialize(back) == serialize(cfg));
  for (const auto& k : config_keys()) CHECK(get_key(back, k) == get_key(cfg, k));

  RunConfig bad;
  try {
    parse_config(bad, "run.level = 3\n", "x.cfg");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.level") != std::string::npos);
    CHECK(std::string(e.what()).find("x.cfg:1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(bad, "run.levels = three\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(bad, "just text\n"), ConfigError);
  RunConfig v;
  v.strip = "thin";
  CHECK_THROWS_AS(v.validate(), ConfigError);
  v = RunConfig{};
  v.preset = "square";
  CHECK_THROWS_AS(v.validate(), ConfigError);
  v = RunConfig{};
  v.levels = 0;
  CHECK_THROWS_AS(v.validate(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/hibox.cfg"), ConfigError);
}

TEST_CASE("smooth step is a C2 transition") {
  CHECK(smooth_step(-2.0) == 0.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.0) == doctest::Approx(0.5));
  const double e = 1e-6;
  for (double t : {-1.5, -0.5, 0.5, 1.5}) {
    CHECK(std::abs(smooth_step(t + e) - smooth_step(t - e)) < 1e-5);
    const double dl = (smooth_step(t) - smooth_step(t - e)) / e, dr = (smooth_step(t + e) - smooth_step(t)) / e;
    CHECK(std::abs(dl - dr) < 1e-4);
    const double d2l = (smooth_step(t) - 2 * smooth_step(t - e) + smooth_step(t - 2 * e)) / (e * e);
    const double d2r = (smooth_step(t + 2 * e) - 2 * smooth_step(t + e) + smooth_step(t)) / (e * e);
    CHECK(std::abs(d2l - d2r) < 1e-2);
  }
  for (double t = -1.4; t < 1.5; t += 0.1) CHECK(smooth_step(t) + smooth_step(-t) == doctest::Approx(1.0));
}

TEST_CASE("all presets build and hierarchical dof stay below uniform dof") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const Preset p = make_preset(name);
    CHECK_FALSE(p.domain.empty());
    const int top = name == "unit_square_advection" ? 1 : 3;
    for (int N = 1; N <= top; ++N) {
      const auto u = discretize(p, "uniform", N, StripKind::THBox, Variant::THBox);
      const auto h = discretize(p, "predefined", N, StripKind::THBox, Variant::THBox);
      CHECK(h.V.size() <= u.V.size());
    }
  }
  CHECK_THROWS_AS(make_preset("circle"), ConfigError);
}

TEST_CASE("quarter-circle dof report") {
  RunConfig cfg;
  cfg.preset = "quarter_circle";
  cfg.levels = 4;
  cfg.mode = "uniform";
  const auto u = dof_report(cfg);
  REQUIRE(u.size() == 4);
  CHECK(u[0].dof == 33);
  CHECK(u[1].dof == 75);
  CHECK(u[2].dof == 207);
  CHECK(u[3].dof == 663);
  cfg.mode = "predefined";
  const auto h = dof_report(cfg);
  CHECK(h[3].thbox == 158);
  CHECK(h[3].strip_dof == 158);
  cfg.preset = "unit_square_advection";
  cfg.mode = "auto";
  CHECK_THROWS_AS(dof_report(cfg), ConfigError);
}

TEST_CASE("SVG rendering") {
  const std::string empty = render_mesh_svg(nullptr);
  CHECK(empty.rfind("<?xml", 0) == 0);
  CHECK(count(empty, "<svg") == 1);
  CHECK(count(empty, "</svg>") == 1);
  CHECK(count(empty, "<polygon") == 0);

  const auto diamond = fixtures::regression_meshes()[1].mesh;
  REQUIRE(diamond.num_levels() == 2);
  const auto V = thbox_basis(diamond);
  const std::string svg = render_mesh_svg(&diamond, &V);
  CHECK(count(svg, "<polygon") == diamond.leaves().size());
  const auto per = V.count_per_level();
  CHECK(count(svg, "<circle") == per[0]);
  CHECK(count(svg, "<rect") == per[1]);
  CHECK(render_mesh_svg(&diamond, &V) == svg);

  const auto mesh = fixtures::boundary_meshes()[0].mesh;
  const auto strip = make_strip(mesh, StripKind::THBox);
  const std::string s = render_strip_svg(mesh, strip);
  CHECK(count(s, "class=\"strip\"") == strip_leaves(mesh, strip).size());
  CHECK(count(s, "class=\"cell\" fill=\"none\"") == mesh.leaves().size() - strip_leaves(mesh, strip).size());
}

TEST_CASE("run writes deterministic artifacts") {
  RunConfig cfg;
  cfg.preset = "quarter_circle";
  cfg.levels = 1;
  const RunResult a = run(cfg);
  REQUIRE(a.rows.size() == 1);
  CHECK(a.rows[0].dof == 33);
  CHECK(a.rows[0].max_error == doctest::Approx(0.1853).epsilon(1e-3));
  const RunResult b = run(cfg);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t k = 0; k < a.artifacts.size(); ++k) CHECK(a.artifacts[k] == b.artifacts[k]);

  // re-running the serialized effective config reproduces the outputs
  RunConfig again;
  parse_config(again, serialize(cfg));
  CHECK(table_csv(run(again)) == table_csv(a));

  const fs::path dir = scratch("run");
  write_artifacts(a, dir.string());
  for (const char* f : {"table.csv", "mesh_level0.txt", "strip.txt", "solution_grid.csv", "mesh.svg", "strip.svg",
                        "config.txt"})
    CHECK(fs::exists(dir / f));
  std::ifstream t(dir / "table.csv");
  std::string header;
  std::getline(t, header);
  CHECK(header == "N,h,dof,strip_dof,max_error");
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".partial");
  fs::remove_all(dir);

  // an output path below a regular file cannot be created
  const fs::path file = scratch("file");
  std::ofstream(file) << "x";
  CHECK_THROWS_AS(write_artifacts(a, (file / "sub").string()), ConfigError);
  fs::remove(file);
}

TEST_CASE("run rejects inconsistent requests") {
  RunConfig cfg;
  cfg.preset = "hexagon";
  cfg.levels = 5;
  CHECK_THROWS_AS(run(cfg), ConfigError);
  cfg.preset = "z_shape";
  cfg.levels = 2;
  cfg.reference_level = 2;
  CHECK_THROWS_AS(run(cfg), ConfigError);
}

TEST_CASE("reference cache stores and reloads a solution") {
  const fs::path dir = scratch("cache");
  RunConfig cfg;
  cfg.preset = "z_shape";
  cfg.levels = 1;
  cfg.reference_level = 2;
  cfg.cache_dir = dir.string();
  const Preset p = make_preset(cfg.preset);
  const auto first = reference_solution(p, cfg, 2, nullptr);
  CHECK_FALSE(first.from_cache);
  CHECK(fs::exists(reference_path(cfg, first.key)));
  const auto second = reference_solution(p, cfg, 2, nullptr);
  CHECK(second.from_cache);
  CHECK(second.U == first.U);
  // a different problem hashes to a different entry
  RunConfig other = cfg;
  other.signs = "flipped";
  CHECK(reference_path(other, reference_key(p, other, 2)) != reference_path(cfg, first.key));
  // a damaged entry is recomputed
  std::ofstream(reference_path(cfg, first.key)) << "garbage\n";
  const auto third = reference_solution(p, cfg, 2, nullptr);
  CHECK_FALSE(third.from_cache);
  CHECK(third.U == first.U);

  const RunResult r = run(cfg);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].dof == 154);
  CHECK(r.rows[0].max_error > 0.0);
  fs::remove_all(dir);
}
