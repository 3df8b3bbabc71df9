#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "css/model.hpp"
#include "css/schrodinger.hpp"
#include "css/solver.hpp"

namespace css {

enum class Fault { none, kernel_sign };

/// Everything a command needs. Text form is one `key = value` per line with
/// dotted keys; `#` starts a comment.
struct RunConfig {
  double L = 12.0;
  int N = 256;
  PotentialSpec potential;
  std::string potential_table;  // path to N^2 little-endian doubles (custom_table)
  ModelSpec model;
  SolverConfig solver;
  int k_max = 8;
  double landscape_s_max = 5.0;
  int landscape_samples = 201;
  double landscape_epsilon = 1e-2;
  double landscape_level = 1.0;
  Fault fault = Fault::none;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"json", "csv", "raw"};
  std::uint64_t seed = 42;

  bool operator==(const RunConfig&) const = default;
};

// config-error naming the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string serialize_config(const RunConfig& config);
void validate_config(const RunConfig& config);
std::vector<std::string> config_keys();

}  // namespace css
