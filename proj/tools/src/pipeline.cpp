#include "hibox_app/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "hibox_app/format.hpp"
#include "hibox_app/render.hpp"

namespace hibox::app {

namespace fs = std::filesystem;

namespace {

Variant variant_of(const RunConfig& cfg) { return cfg.effective_variant() == "thbox" ? Variant::THBox : Variant::HBox; }

SolverKind solver_of(const RunConfig& cfg) {
  if (cfg.solver == "schur") return SolverKind::Schur;
  if (cfg.solver == "monolithic") return SolverKind::Monolithic;
  return SolverKind::Auto;
}

ProblemSpec problem_for(const Preset& p, const HierarchicalMesh& mesh, const RunConfig& cfg) {
  ProblemSpec ps = p.problem(mesh, cfg);
  ps.boundary_points = cfg.boundary_points;
  ps.validate();
  return ps;
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string solution_grid(const ErrorReport& rep, TableKind table) {
  std::string out = table == TableKind::MaxError ? "r,s,x,y,u_h,error\n" : "r,s,x,y,u_h\n";
  for (const auto& q : rep.field) {
    std::vector<std::string> f = {fmt(q.param.x()), fmt(q.param.y()), fmt(q.x.x()), fmt(q.x.y()), fmt(q.uh)};
    if (table == TableKind::MaxError) f.push_back(fmt(q.error));
    out += csv_line(f);
  }
  return out;
}

void fill_values(Row& row, const ErrorReport& rep, TableKind table) {
  if (table == TableKind::MaxError) {
    row.max_error = rep.max_error;
    return;
  }
  row.vmax = -INFINITY;
  row.vmin = INFINITY;
  for (const auto& q : rep.field) {
    row.vmax = std::max(row.vmax, q.uh);
    row.vmin = std::min(row.vmin, q.uh);
  }
}

void log_line(std::ostream* log, const std::string& s) {
  if (log) *log << s << '\n' << std::flush;
}

RunResult run_impl(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const Preset p = make_preset(cfg.preset);
  const std::string mode = cfg.effective_mode();
  const StripKind sk = strip_kind_from_string(cfg.strip);
  const Variant var = variant_of(cfg);
  if (mode == "predefined" && p.max_predefined_levels > 0 && cfg.levels > p.max_predefined_levels)
    throw ConfigError("run.levels: preset '" + p.name + "' defines refinement up to " +
                      std::to_string(p.max_predefined_levels) + " levels");

  RunResult r;
  r.table = p.table;
  r.mode = mode;

  std::optional<ReferenceSolution> ref;
  if (p.table == TableKind::MaxError && !p.exact) {
    const int L = cfg.effective_reference_level();
    if (L <= cfg.levels) throw ConfigError("reference.level: must exceed run.levels");
    ref = reference_solution(p, cfg, L, log);
  }
  const Reference reference = [&](const Vec2& param, const Vec2& x) {
    if (p.table == TableKind::MinMax) return 0.0;
    return p.exact ? p.exact(x) : (*ref)(param);
  };

  std::optional<Discretization> last;
  std::vector<double> lastU;
  ErrorReport lastRep;

  if (mode == "adaptive") {
    AdaptiveOptions o;
    o.steps = cfg.levels - 1;
    o.rule = ThresholdRule::parse(cfg.threshold_rule, cfg.threshold);
    o.dilation = cfg.dilation;
    o.variant = var;
    o.strip = sk;
    o.solver = solver_of(cfg);
    const auto steps = adaptive_loop([&](const HierarchicalMesh& m) { return problem_for(p, m, cfg); }, p.domain,
                                     p.h0, p.map, o);
    std::string acsv = "step,N,h,dof,strip_dof,indicator_max,indicator_min,marked\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const AdaptiveStep& s = steps[k];
      Row row;
      row.N = static_cast<int>(k) + 1;
      row.h = s.mesh.h(s.mesh.num_levels() - 1);
      row.dof = s.V.size();
      row.strip_dof = s.W.size();
      lastU = to_std(s.solution.U);
      lastRep = error_report(lastU, s.V, s.mesh, p.map, reference);
      fill_values(row, lastRep, p.table);
      row.indicator_max = *std::max_element(s.indicators.begin(), s.indicators.end());
      row.indicator_min = *std::min_element(s.indicators.begin(), s.indicators.end());
      row.marked = s.plan.marked_count();
      acsv += csv_line({fmt(static_cast<long long>(k)), fmt(static_cast<long long>(row.N)), fmt(row.h),
                        fmt(static_cast<long long>(row.dof)), fmt(static_cast<long long>(row.strip_dof)),
                        fmt(row.indicator_max), fmt(row.indicator_min), fmt(static_cast<long long>(row.marked))});
      r.rows.push_back(row);
      log_line(log, "step " + std::to_string(k) + ": dof " + std::to_string(row.dof) + ", strip dof " +
                        std::to_string(row.strip_dof) + ", " + s.solution.method);
    }
    last = Discretization{steps.back().mesh, steps.back().V, steps.back().strip, steps.back().W};
    r.artifacts.emplace_back("adapt.csv", acsv);
  } else {
    for (int N = 1; N <= cfg.levels; ++N) {
      Discretization d = discretize(p, mode, N, sk, var);
      const BlockSystem sys = assemble(problem_for(p, d.mesh, cfg), d.mesh, d.V, d.strip, d.W, p.map);
      const Solution sol = solve(sys, solver_of(cfg));
      Row row;
      row.N = N;
      row.h = p.h0 * std::ldexp(1.0, -(N - 1));
      row.dof = d.V.size();
      row.strip_dof = d.W.size();
      lastU = to_std(sol.U);
      lastRep = error_report(lastU, d.V, d.mesh, p.map, reference);
      fill_values(row, lastRep, p.table);
      r.rows.push_back(row);
      log_line(log, "N=" + std::to_string(N) + ": dof " + std::to_string(row.dof) + ", strip dof " +
                        std::to_string(row.strip_dof) + ", " + sol.method);
      last = std::move(d);
    }
  }

  r.artifacts.emplace_back("table.csv", table_csv(r));
  r.artifacts.emplace_back("config.txt", serialize(cfg));
  for (int l = 0; l < last->mesh.num_levels(); ++l)
    r.artifacts.emplace_back("mesh_level" + std::to_string(l) + ".txt", export_mesh_level(last->mesh, l));
  r.artifacts.emplace_back("strip.txt", export_strip(last->strip));
  r.artifacts.emplace_back("solution_grid.csv", solution_grid(lastRep, p.table));
  if (cfg.svg) {
    r.artifacts.emplace_back("mesh.svg", render_mesh_svg(&last->mesh, &last->V));
    r.artifacts.emplace_back("strip.svg", render_strip_svg(last->mesh, last->strip));
  }
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Discretization discretize(const Preset& preset, const std::string& mode, int levels, StripKind strip, Variant variant) {
  if (levels < 1) throw ConfigError("run.levels: must be at least 1");
  HierarchicalMesh mesh = [&] {
    if (mode == "uniform") return build_mesh(refine_domain(preset.domain, levels), {}, preset.h0 * std::ldexp(1.0, -(levels - 1)));
    if (mode == "predefined") return build_mesh(preset.domain, preset.regions(levels), preset.h0);
    throw ConfigError("run.mode: '" + mode + "' has no fixed discretization");
  }();
  HierarchicalBasis V = make_basis(mesh.hierarchy(), mesh.h0(), variant);
  BoundaryStrip s = make_strip(mesh, strip);
  HierarchicalBasis W = strip_flux_basis(s, mesh.h0(), variant);
  return {std::move(mesh), std::move(V), std::move(s), std::move(W)};
}

std::string cache_directory(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (const char* env = std::getenv("HIBOX_CACHE_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) return (fs::path(home) / ".cache" / "hibox").string();
  return ".hibox-cache";
}

std::string reference_key(const Preset& preset, const RunConfig& cfg, int level) {
  return "format=1\npreset=" + preset.name + "\nlevel=" + std::to_string(level) + "\nsigns=" + cfg.signs +
         "\nboundary_points=" + std::to_string(cfg.boundary_points) + "\n";
}

std::string reference_path(const RunConfig& cfg, const std::string& key) {
  return (fs::path(cache_directory(cfg)) / (hex64(fnv1a(key)) + ".ref")).string();
}

ReferenceSolution reference_solution(const Preset& preset, const RunConfig& cfg, int level, std::ostream* log) {
  ReferenceSolution ref;
  ref.level = level;
  ref.key = reference_key(preset, cfg, level);
  Discretization d = discretize(preset, "uniform", level, StripKind::Fixed, Variant::HBox);
  ref.V = std::move(d.V);
  const fs::path path = reference_path(cfg, ref.key);

  if (fs::exists(path)) {
    std::istringstream in(read_file(path));
    std::string line, key;
    std::getline(in, line);
    if (line == "hibox-reference") {
      while (std::getline(in, line) && line.rfind("key ", 0) == 0) key += line.substr(4) + "\n";
      std::size_t n = 0;
      if (key == ref.key && line.rfind("n ", 0) == 0) n = std::stoull(line.substr(2));
      if (n == ref.V.size()) {
        ref.U.reserve(n);
        while (std::getline(in, line) && ref.U.size() < n) ref.U.push_back(std::strtod(line.c_str(), nullptr));
        if (ref.U.size() == n) {
          ref.from_cache = true;
          log_line(log, "reference level " + std::to_string(level) + " loaded from " + path.string());
          return ref;
        }
      }
    }
    log_line(log, "ignoring stale cache entry " + path.string());
    ref.U.clear();
  }

  log_line(log, "solving reference level " + std::to_string(level) + " (" + std::to_string(ref.V.size()) + " dof)");
  const BlockSystem sys = assemble(problem_for(preset, d.mesh, cfg), d.mesh, ref.V, d.strip, d.W, preset.map);
  ref.U = to_std(solve(sys).U);

  std::string out = "hibox-reference\n";
  std::istringstream keys(ref.key);
  for (std::string l; std::getline(keys, l);) out += "key " + l + "\n";
  out += "n " + std::to_string(ref.U.size()) + "\n";
  for (double v : ref.U) out += fmt(v) + "\n";
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary);
    o << out;
    if (!o) ec = std::make_error_code(std::errc::io_error);
  }
  if (!ec) fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    log_line(log, "could not write cache entry " + path.string());
  }
  return ref;
}

RunResult run(const RunConfig& cfg, std::ostream* log) {
  try {
    return run_impl(cfg, log);
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(e.what());
  }
}

std::string table_csv(const RunResult& r) {
  std::string out = r.table == TableKind::MaxError ? "N,h,dof,strip_dof,max_error\n" : "N,h,dof,strip_dof,max,min\n";
  for (const Row& row : r.rows) {
    std::vector<std::string> f = {fmt(static_cast<long long>(row.N)), fmt(row.h), fmt(static_cast<long long>(row.dof)),
                                  fmt(static_cast<long long>(row.strip_dof))};
    if (r.table == TableKind::MaxError) {
      f.push_back(fmt(row.max_error));
    } else {
      f.push_back(fmt(row.vmax));
      f.push_back(fmt(row.vmin));
    }
    out += csv_line(f);
  }
  return out;
}

void write_artifacts(const RunResult& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir: cannot create '" + dir + "': " + ec.message());
  std::vector<fs::path> staged;
  auto cleanup = [&] {
    for (const auto& s : staged) fs::remove(s, ec);
  };
  for (const auto& [name, body] : r.artifacts) {
    const fs::path tmp = fs::path(dir) / (name + ".partial");
    std::ofstream o(tmp, std::ios::binary);
    o << body;
    o.close();
    staged.push_back(tmp);
    if (!o) {
      cleanup();
      throw ConfigError("output.dir: cannot write '" + tmp.string() + "'");
    }
  }
  for (std::size_t k = 0; k < staged.size(); ++k) {
    fs::rename(staged[k], fs::path(dir) / r.artifacts[k].first, ec);
    if (ec) {
      cleanup();
      for (std::size_t j = 0; j < k; ++j) fs::remove(fs::path(dir) / r.artifacts[j].first, ec);
      throw ConfigError("output.dir: cannot finalize artifacts in '" + dir + "'");
    }
  }
}

std::vector<DofRow> dof_report(const RunConfig& cfg) {
  cfg.validate();
  const Preset p = make_preset(cfg.preset);
  const std::string mode = cfg.effective_mode();
  if (mode == "adaptive") throw ConfigError("run.mode: dof-report needs a uniform or predefined mode");
  if (mode == "predefined" && p.max_predefined_levels > 0 && cfg.levels > p.max_predefined_levels)
    throw ConfigError("run.levels: preset '" + p.name + "' defines refinement up to " +
                      std::to_string(p.max_predefined_levels) + " levels");
  const StripKind sk = strip_kind_from_string(cfg.strip);
  std::vector<DofRow> out;
  for (int N = 1; N <= cfg.levels; ++N) {
    const Discretization d = discretize(p, mode, N, sk, variant_of(cfg));
    DofRow row;
    row.N = N;
    row.h = p.h0 * std::ldexp(1.0, -(N - 1));
    row.dof = d.V.size();
    row.strip_dof = d.W.size();
    row.fixed = strip_flux_basis(fixed_strip(d.mesh), d.mesh.h0(), Variant::HBox).size();
    row.hbox = strip_flux_basis(make_strip(d.mesh, StripKind::HBox), d.mesh.h0(), Variant::HBox).size();
    row.thbox = strip_flux_basis(make_strip(d.mesh, StripKind::THBox), d.mesh.h0(), Variant::THBox).size();
    out.push_back(row);
  }
  return out;
}

std::string dof_csv(const std::vector<DofRow>& rows) {
  std::string out = "N,h,dof,strip_dof,fixed_strip_dof,hbox_strip_dof,thbox_strip_dof\n";
  for (const DofRow& r : rows)
    out += csv_line({fmt(static_cast<long long>(r.N)), fmt(r.h), fmt(static_cast<long long>(r.dof)),
                     fmt(static_cast<long long>(r.strip_dof)), fmt(static_cast<long long>(r.fixed)),
                     fmt(static_cast<long long>(r.hbox)), fmt(static_cast<long long>(r.thbox))});
  return out;
}

}  // namespace hibox::app
