#include "hibox_app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hibox_app/format.hpp"
#include "hibox_app/presets.hpp"

namespace hibox::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string msg = key + ": '" + v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field str_field(T RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = v; }, [m](const RunConfig& c) { return c.*m; }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = [] {
    std::map<std::string, Field> m;
    m["problem.preset"] = str_field(&RunConfig::preset);
    m["run.levels"] = {[](RunConfig& c, const std::string& v) { c.levels = to_int("run.levels", v); },
                       [](const RunConfig& c) { return fmt(static_cast<long long>(c.levels)); }};
    m["run.mode"] = str_field(&RunConfig::mode);
    m["run.strip"] = str_field(&RunConfig::strip);
    m["run.variant"] = str_field(&RunConfig::variant);
    m["solver.kind"] = str_field(&RunConfig::solver);
    m["solver.signs"] = str_field(&RunConfig::signs);
    m["quadrature.boundary_points"] = {
        [](RunConfig& c, const std::string& v) { c.boundary_points = to_int("quadrature.boundary_points", v); },
        [](const RunConfig& c) { return fmt(static_cast<long long>(c.boundary_points)); }};
    m["advection.smoothing_width"] = {
        [](RunConfig& c, const std::string& v) { c.smoothing_width = to_double("advection.smoothing_width", v); },
        [](const RunConfig& c) { return fmt(c.smoothing_width); }};
    m["adapt.rule"] = str_field(&RunConfig::threshold_rule);
    m["adapt.threshold"] = {[](RunConfig& c, const std::string& v) { c.threshold = to_double("adapt.threshold", v); },
                            [](const RunConfig& c) { return fmt(c.threshold); }};
    m["adapt.dilation"] = {[](RunConfig& c, const std::string& v) { c.dilation = to_int("adapt.dilation", v); },
                           [](const RunConfig& c) { return fmt(static_cast<long long>(c.dilation)); }};
    m["reference.level"] = {
        [](RunConfig& c, const std::string& v) { c.reference_level = to_int("reference.level", v); },
        [](const RunConfig& c) { return fmt(static_cast<long long>(c.reference_level)); }};
    m["reference.cache_dir"] = str_field(&RunConfig::cache_dir);
    m["output.dir"] = str_field(&RunConfig::output);
    m["output.svg"] = {[](RunConfig& c, const std::string& v) { c.svg = to_bool("output.svg", v); },
                       [](const RunConfig& c) { return std::string(c.svg ? "true" : "false"); }};
    return m;
  }();
  return f;
}

}  // namespace

void RunConfig::validate() const {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), preset) == names.end()) {
    std::string msg = "problem.preset: unknown preset '" + preset + "'; available:";
    for (const auto& n : names) msg += " " + n;
    throw ConfigError(msg);
  }
  if (levels < 1 || levels > 8) throw ConfigError("run.levels: must lie in 1..8");
  one_of("run.mode", mode, {"auto", "uniform", "predefined", "adaptive"});
  one_of("run.strip", strip, {"fixed", "hbox", "thbox"});
  one_of("run.variant", variant, {"auto", "hbox", "thbox"});
  one_of("solver.kind", solver, {"auto", "schur", "monolithic"});
  one_of("solver.signs", signs, {"consistent", "flipped"});
  if (boundary_points < 1 || boundary_points > 32) throw ConfigError("quadrature.boundary_points: must lie in 1..32");
  if (!(smoothing_width >= 0.0)) throw ConfigError("advection.smoothing_width: must be non-negative");
  one_of("adapt.rule", threshold_rule, {"fraction", "absolute", "quantile"});
  if (!(threshold >= 0.0)) throw ConfigError("adapt.threshold: must be non-negative");
  if (threshold_rule == "quantile" && threshold > 1.0) throw ConfigError("adapt.threshold: a quantile must lie in [0, 1]");
  if (dilation < 0 || dilation > 8) throw ConfigError("adapt.dilation: must lie in 0..8");
  if (reference_level < 0 || reference_level > 8) throw ConfigError("reference.level: must lie in 0..8");
  if (output.empty()) throw ConfigError("output.dir: must not be empty");
}

std::string RunConfig::effective_mode() const {
  if (mode != "auto") return mode;
  return make_preset(preset).default_mode;
}

std::string RunConfig::effective_variant() const {
  if (variant != "auto") return variant;
  return strip == "thbox" ? "thbox" : "hbox";
}

int RunConfig::effective_reference_level() const { return reference_level > 0 ? reference_level : levels + 2; }

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, f] : fields()) out.push_back(k);
  return out;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second.set(cfg, value);
}

std::string get_key(const RunConfig& cfg, const std::string& key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second.get(cfg);
}

void parse_config(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  parse_config(cfg, ss.str(), path);
  return cfg;
}

std::string serialize(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace hibox::app
