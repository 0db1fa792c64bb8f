#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relblow/criteria.hpp"
#include "relblow/gas.hpp"
#include "relblow/solver.hpp"

namespace relblow::cli {

// Values of the nested-table config format: numbers, strings, booleans and
// flat arrays of numbers or strings.
using ConfigValue =
    std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

// Flattened key-value view of a config file: "[grid]\ncells = 256" parses to
// {"grid.cells": 256}. Sections nest with dots; # starts a comment.
class ConfigMap {
public:
  static ConfigMap parse(const std::string& text);
  static ConfigMap parse_file(const std::string& path);

  void set_from_string(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key, double fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;

  const std::map<std::string, ConfigValue>& raw() const { return values_; }

private:
  std::map<std::string, ConfigValue> values_;
};

enum class RunMode { simulate, criteria, thresholds, verify_identities, verify_dynamics, sweep };

std::optional<RunMode> parse_mode(const std::string& name);
const char* to_string(RunMode m);

struct ProfileConfig {
  ProfileSpec rho, u, S;
};

// Fully resolved run description; every field appears in the manifest.
struct RunConfig {
  RunMode mode = RunMode::simulate;
  GasParams gas;
  bool isentropic = true;

  GridSpec grid{-6.0, 6.0, 1024, Bc::periodic};
  double t_end = 1.0;
  double cfl = 0.4;
  double output_dt = 0.0;  // 0: t_end / 50

  std::string preset;      // bundled initial-data families
  std::string initial_csv; // or explicit CSV initial data
  ProfileConfig profiles;
  int data_samples = 0;    // criteria sampling resolution; 0: 2x grid cells

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int verify_samples = 160;

  // sweep mode
  std::string sweep_key;
  std::vector<double> sweep_values;

  std::string to_manifest_json() const;
};

// Builds the resolved config: preset defaults first, then the file, then the
// --set overrides (flags win).
RunConfig resolve_config(RunMode mode, const std::optional<std::string>& config_path,
                         const std::vector<std::string>& overrides,
                         const std::optional<std::string>& out_dir,
                         const std::optional<std::uint64_t>& seed);

// Initial data of the resolved config at the requested sampling.
InitialData initial_data(const RunConfig& cfg, int samples);

}  // namespace relblow::cli
