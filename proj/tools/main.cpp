#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hibox_app/config.hpp"
#include "hibox_app/format.hpp"
#include "hibox_app/pipeline.hpp"
#include "hibox_app/render.hpp"

using namespace hibox;
using namespace hibox::app;
namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config_file;
  std::vector<std::string> sets;
  std::string preset, levels, mode, strip, variant, solver, signs, output, reference_level;
  bool no_svg = false;

  void add(CLI::App* app, bool with_output) {
    app->add_option("--config", config_file, "config file with section.key = value lines");
    app->add_option("--preset", preset, "hexagon, quarter_circle, z_shape, triangle_hole, unit_square_advection");
    app->add_option("--levels", levels, "number of levels N");
    app->add_option("--mode", mode, "auto, uniform, predefined or adaptive");
    app->add_option("--strip", strip, "fixed, hbox or thbox");
    app->add_option("--variant", variant, "auto, hbox or thbox");
    app->add_option("--solver", solver, "auto, schur or monolithic");
    app->add_option("--signs", signs, "consistent or flipped");
    app->add_option("--reference-level", reference_level, "level of the reference solve");
    if (with_output) {
      app->add_option("--output", output, "output directory");
      app->add_flag("--no-svg", no_svg, "skip the SVG figures");
    }
    app->add_option("--set", sets, "key=value override, repeatable");
  }

  RunConfig apply() const {
    RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
    const std::pair<const char*, const std::string*> map[] = {
        {"problem.preset", &preset}, {"run.levels", &levels},     {"run.mode", &mode},
        {"run.strip", &strip},       {"run.variant", &variant},   {"solver.kind", &solver},
        {"solver.signs", &signs},    {"output.dir", &output},     {"reference.level", &reference_level}};
    for (const auto& [key, v] : map)
      if (!v->empty()) set_key(cfg, key, *v);
    if (no_svg) cfg.svg = false;
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      set_key(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

void print_rows(const RunResult& r) { std::cout << table_csv(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical box-spline solver with weak boundary conditions"};
  app.require_subcommand(1);

  Overrides run_o, dof_o, render_o;
  auto* run_cmd = app.add_subcommand("run", "solve and write table.csv, meshes, strip, sampled solution and SVGs");
  run_o.add(run_cmd, true);

  auto* dof_cmd = app.add_subcommand("dof-report", "basis and strip sizes without solving");
  dof_o.add(dof_cmd, false);

  std::string what = "mesh", svg_path;
  auto* render_cmd = app.add_subcommand("render", "draw the mesh or the strip of the finest level as SVG");
  render_o.add(render_cmd, false);
  render_cmd->add_option("--what", what, "mesh or strip")->check(CLI::IsMember({"mesh", "strip"}));
  render_cmd->add_option("--file", svg_path, "SVG path")->required();

  auto* cache_cmd = app.add_subcommand("cache", "manage cached reference solutions");
  std::string cache_dir;
  cache_cmd->add_option("--dir", cache_dir, "cache directory (default $HIBOX_CACHE_DIR or ~/.cache/hibox)");
  cache_cmd->require_subcommand(1);
  auto* cache_list = cache_cmd->add_subcommand("list", "list entries");
  auto* cache_clear = cache_cmd->add_subcommand("clear", "remove all entries");
  auto* cache_path = cache_cmd->add_subcommand("path", "print the cache directory");
  Overrides build_o;
  auto* cache_build = cache_cmd->add_subcommand("build", "solve and store a reference");
  build_o.add(cache_build, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const RunConfig cfg = run_o.apply();
      const RunResult r = run(cfg, &std::cerr);
      write_artifacts(r, cfg.output);
      print_rows(r);
    } else if (*dof_cmd) {
      std::cout << dof_csv(dof_report(dof_o.apply()));
    } else if (*render_cmd) {
      const RunConfig cfg = render_o.apply();
      const Preset p = make_preset(cfg.preset);
      const Variant v = cfg.effective_variant() == "thbox" ? Variant::THBox : Variant::HBox;
      const Discretization d = discretize(p, cfg.effective_mode(), cfg.levels, strip_kind_from_string(cfg.strip), v);
      const std::string svg = what == "mesh" ? render_mesh_svg(&d.mesh, &d.V) : render_strip_svg(d.mesh, d.strip);
      std::ofstream o(svg_path, std::ios::binary);
      o << svg;
      if (!o) throw ConfigError("cannot write '" + svg_path + "'");
    } else if (*cache_cmd) {
      RunConfig base;
      if (!cache_dir.empty()) base.cache_dir = cache_dir;
      const fs::path dir = cache_directory(base);
      if (*cache_path) {
        std::cout << dir.string() << '\n';
      } else if (*cache_list) {
        if (fs::exists(dir)) {
          std::vector<fs::path> files;
          for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".ref") files.push_back(e.path());
          std::sort(files.begin(), files.end());
          for (const auto& f : files) {
            std::ifstream in(f);
            std::string line, desc;
            while (std::getline(in, line) && line.rfind("n ", 0) != 0)
              if (line.rfind("key ", 0) == 0) desc += (desc.empty() ? "" : " ") + line.substr(4);
            std::cout << f.filename().string() << ' ' << fs::file_size(f) << ' ' << desc << '\n';
          }
        }
      } else if (*cache_clear) {
        std::size_t n = 0;
        if (fs::exists(dir))
          for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".ref") n += fs::remove(e.path());
        std::cout << "removed " << n << " entries\n";
      } else if (*cache_build) {
        RunConfig cfg = build_o.apply();
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        const Preset p = make_preset(cfg.preset);
        try {
          const ReferenceSolution ref = reference_solution(p, cfg, cfg.effective_reference_level(), &std::cerr);
          std::cout << reference_path(cfg, ref.key) << '\n';
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          throw NumericalError(e.what());
        }
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "hibox: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "hibox: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "hibox: numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
