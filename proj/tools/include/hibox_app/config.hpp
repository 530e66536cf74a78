#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hibox::app {

// Invalid configuration; exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure during a run; exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string preset = "hexagon";
  int levels = 3;
  std::string mode = "auto";     // auto | uniform | predefined | adaptive
  std::string strip = "thbox";   // fixed | hbox | thbox
  std::string variant = "auto";  // auto | hbox | thbox; auto follows the strip
  std::string solver = "auto";   // auto | schur | monolithic
  std::string signs = "consistent";  // consistent | flipped
  int boundary_points = 6;
  double smoothing_width = 3.0;  // in units of the finest h
  std::string threshold_rule = "fraction";  // fraction | absolute | quantile
  double threshold = 0.5;
  int dilation = 1;
  int reference_level = 0;  // 0: finest requested level + 2
  std::string cache_dir;    // empty: $HIBOX_CACHE_DIR, then ~/.cache/hibox
  std::string output = "hibox-out";
  bool svg = true;

  void validate() const;
  std::string effective_mode() const;
  std::string effective_variant() const;
  int effective_reference_level() const;
};

std::vector<std::string> config_keys();
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_key(const RunConfig& cfg, const std::string& key);

// `section.key = value` lines; '#' starts a comment.
void parse_config(RunConfig& cfg, const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string serialize(const RunConfig& cfg);

}  // namespace hibox::app
