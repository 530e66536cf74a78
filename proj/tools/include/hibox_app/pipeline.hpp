#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hibox/adapt.hpp"
#include "hibox_app/config.hpp"
#include "hibox_app/presets.hpp"

namespace hibox::app {

struct Discretization {
  HierarchicalMesh mesh;
  HierarchicalBasis V;
  BoundaryStrip strip;
  HierarchicalBasis W;
};

// mode is "uniform" or "predefined".
Discretization discretize(const Preset& preset, const std::string& mode, int levels, StripKind strip, Variant variant);

struct ReferenceSolution {
  int level = 0;
  HierarchicalBasis V;
  std::vector<double> U;
  std::string key;
  bool from_cache = false;

  double operator()(const Vec2& param) const { return V.evaluate(U, param).value; }
};

std::string cache_directory(const RunConfig& cfg);
// Content describing the reference problem; its FNV-1a hash names the cache file.
std::string reference_key(const Preset& preset, const RunConfig& cfg, int level);
std::string reference_path(const RunConfig& cfg, const std::string& key);
// Loads from the cache or solves the uniform problem at `level` and stores it.
ReferenceSolution reference_solution(const Preset& preset, const RunConfig& cfg, int level, std::ostream* log);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
  int N = 0;
  double h = 0.0;
  std::size_t dof = 0;
  std::size_t strip_dof = 0;
  double max_error = kNaN;
  double vmax = kNaN;
  double vmin = kNaN;
  double indicator_max = kNaN;
  double indicator_min = kNaN;
  std::size_t marked = 0;
};

struct RunResult {
  TableKind table = TableKind::MaxError;
  std::string mode;
  std::vector<Row> rows;
  std::vector<std::pair<std::string, std::string>> artifacts;  // file name, contents
};

// Config and numerical errors are thrown as ConfigError and NumericalError.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);
std::string table_csv(const RunResult& r);
// Writes every artifact or none.
void write_artifacts(const RunResult& r, const std::string& dir);

struct DofRow {
  int N = 0;
  double h = 0.0;
  std::size_t dof = 0;
  std::size_t strip_dof = 0;
  std::size_t fixed = 0, hbox = 0, thbox = 0;
};

std::vector<DofRow> dof_report(const RunConfig& cfg);
std::string dof_csv(const std::vector<DofRow>& rows);

}  // namespace hibox::app
