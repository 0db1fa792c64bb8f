#include "cli_config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relblow/errors.hpp"
#include "relblow/riemann_non.hpp"
#include "relblow/thresholds.hpp"

namespace relblow::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  std::size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

ConfigValue parse_value(const std::string& raw, const std::string& key) {
  const std::string v = trim(raw);
  if (v.empty()) throw config_error("config: empty value for '" + key + "'");
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw config_error("config: unterminated string for '" + key + "'");
    return v.substr(1, v.size() - 2);
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw config_error("config: unterminated array for '" + key + "'");
    std::vector<double> nums;
    std::vector<std::string> strs;
    std::string inner = v.substr(1, v.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    bool any_string = false;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      double d;
      if (!item.empty() && item.front() == '"') {
        if (item.back() != '"') throw config_error("config: bad array string in '" + key + "'");
        strs.push_back(item.substr(1, item.size() - 2));
        any_string = true;
      } else if (parse_number(item, d)) {
        nums.push_back(d);
      } else {
        throw config_error("config: bad array item '" + item + "' in '" + key + "'");
      }
    }
    if (any_string && !nums.empty())
      throw config_error("config: mixed array types in '" + key + "'");
    if (any_string) return strs;
    return nums;
  }
  double d;
  if (parse_number(v, d)) return d;
  throw config_error("config: cannot parse value '" + v + "' for '" + key + "'");
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text) {
  ConfigMap out;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(lineno) + ": empty section");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    out.values_[full] = parse_value(line.substr(eq + 1), full);
  }
  return out;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void ConfigMap::set_from_string(const std::string& key, const std::string& value) {
  values_[key] = parse_value(value, key);
}

double ConfigMap::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw config_error("config: '" + key + "' must be a number");
}

bool ConfigMap::boolean(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  throw config_error("config: '" + key + "' must be a boolean");
}

std::string ConfigMap::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw config_error("config: '" + key + "' must be a string");
}

std::vector<double> ConfigMap::numbers(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  if (const double* d = std::get_if<double>(&it->second)) return {*d};
  throw config_error("config: '" + key + "' must be a number array");
}

std::optional<RunMode> parse_mode(const std::string& name) {
  if (name == "simulate") return RunMode::simulate;
  if (name == "criteria") return RunMode::criteria;
  if (name == "thresholds") return RunMode::thresholds;
  if (name == "verify-identities") return RunMode::verify_identities;
  if (name == "verify-dynamics") return RunMode::verify_dynamics;
  if (name == "sweep") return RunMode::sweep;
  return std::nullopt;
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::simulate: return "simulate";
    case RunMode::criteria: return "criteria";
    case RunMode::thresholds: return "thresholds";
    case RunMode::verify_identities: return "verify-identities";
    case RunMode::verify_dynamics: return "verify-dynamics";
    case RunMode::sweep: return "sweep";
  }
  return "?";
}

namespace {

ProfileSpec::Family parse_family(const std::string& name, const std::string& key) {
  if (name == "constant") return ProfileSpec::Family::constant;
  if (name == "gaussian" || name == "gaussian-bump") return ProfileSpec::Family::gaussian;
  if (name == "tanh" || name == "tanh-ramp") return ProfileSpec::Family::tanh_ramp;
  if (name == "sine") return ProfileSpec::Family::sine;
  throw config_error("config: unknown profile family '" + name + "' for " + key);
}

ProfileSpec profile_from(const ConfigMap& m, const std::string& prefix,
                         const ProfileSpec& fallback) {
  ProfileSpec p = fallback;
  if (m.has(prefix + ".family"))
    p.family = parse_family(m.str(prefix + ".family", "constant"), prefix);
  p.base = m.number(prefix + ".base", p.base);
  p.amp = m.number(prefix + ".amp", p.amp);
  p.x0 = m.number(prefix + ".x0", p.x0);
  p.width = m.number(prefix + ".width", p.width);
  return p;
}

const char* family_name(ProfileSpec::Family f) {
  switch (f) {
    case ProfileSpec::Family::constant: return "constant";
    case ProfileSpec::Family::gaussian: return "gaussian";
    case ProfileSpec::Family::tanh_ramp: return "tanh";
    case ProfileSpec::Family::sine: return "sine";
  }
  return "?";
}

// Bundled presets. The strong compression preset is finalized at resolve time
// by bisecting the bump width until min r0 < -N1 with a 10% margin.
void apply_preset(RunConfig& cfg) {
  if (cfg.preset.empty()) return;
  if (cfg.preset == "iso-rarefaction") {
    cfg.isentropic = true;
    cfg.gas = GasParams{2.0, 1.0, 1.0, 1.0, 1.0};
    cfg.grid = {-20.0, 20.0, 4096, Bc::outflow};
    cfg.t_end = 50.0;
    cfg.profiles.rho = {ProfileSpec::Family::constant, 0.15, 0.0, 0.0, 1.0};
    cfg.profiles.u = {ProfileSpec::Family::tanh_ramp, 0.0, 0.25, 0.0, 1.5};
    cfg.profiles.S = {ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};
  } else if (cfg.preset == "iso-compression") {
    cfg.isentropic = true;
    cfg.gas = GasParams{2.0, 1.0, 1.0, 1.0, 1.0};
    cfg.grid = {-6.0, 6.0, 4096, Bc::outflow};
    cfg.t_end = 8.0;
    cfg.profiles.rho = {ProfileSpec::Family::gaussian, 0.12, 0.08, 0.0, 0.8};
    cfg.profiles.u = {ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};
    cfg.profiles.S = {ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};
  } else if (cfg.preset == "noniso-weak" || cfg.preset == "noniso-strong") {
    cfg.isentropic = false;
    cfg.gas = GasParams{2.0, 1.0, 1.0, 1.0, 0.6};
    cfg.grid = {-8.0, 8.0, 1024, Bc::outflow};
    cfg.t_end = 0.8;
    cfg.profiles.rho = {ProfileSpec::Family::gaussian, 0.16, 0.02, 0.0, 2.0};
    cfg.profiles.u = {ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};
    cfg.profiles.S = {ProfileSpec::Family::tanh_ramp, 0.0, 0.15, 3.0, 0.8};
  } else {
    throw config_error("config: unknown preset '" + cfg.preset + "'");
  }
}

}  // namespace

// The strong preset adds a velocity dip at x = -3 whose width shrinks until
// the compression exceeds the threshold.
struct StrongBump {
  double amp = 0.25;
  double width = 0.5;
};

InitialData initial_data(const RunConfig& cfg, int samples) {
  if (!cfg.initial_csv.empty()) return load_initial_csv(cfg.initial_csv);

  InitialData d = sample_profiles(cfg.grid.x_min, cfg.grid.x_max, samples,
                                  cfg.profiles.rho, cfg.profiles.u, cfg.profiles.S);
  if (cfg.preset == "noniso-strong") {
    // bisect the bump width so that min r0 crosses -1.1 N1
    NonisoFields base = noniso_fields(d, cfg.gas);
    double sw = 0.0, sz = 0.0, t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < base.w0.size(); ++i) {
      sw = std::max(sw, std::abs(base.w0[i]));
      sz = std::max(sz, std::abs(base.z0[i]));
      t1 = std::max(t1, std::abs(base.theta1[i]));
      t2 = std::max(t2, std::abs(base.theta2[i]));
    }
    ThresholdOpts topt;
    topt.grid_n = 17;
    topt.max_rounds = 3;
    // amplitude reserve for the bump in the box bounds
    ThresholdResult th = compression_thresholds(
        cfg.gas, sw + 0.3, sz + 0.3, t1, t2, base.eps, topt);

    const StrongBump bump;
    auto with_width = [&](double width) {
      InitialData dd = d;
      for (std::size_t i = 0; i < dd.x.size(); ++i) {
        const double tt = (dd.x[i] + 3.0) / width;
        dd.u0[i] += -bump.amp * std::exp(-tt * tt);
      }
      return dd;
    };
    auto min_r0 = [&](double width) {
      NonisoFields f = noniso_fields(with_width(width), cfg.gas);
      double mr = f.r0[0];
      for (double v : f.r0) mr = std::min(mr, v);
      return mr;
    };
    double wide = 1.2, narrow = 0.02;
    const double target = -1.1 * th.N1;
    if (min_r0(wide) > target) {
      while (min_r0(narrow) > target && narrow > 1e-4) narrow *= 0.5;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (wide + narrow);
        (min_r0(mid) > target ? wide : narrow) = mid;
      }
    }
    return with_width(narrow);
  }
  return d;
}

std::string RunConfig::to_manifest_json() const {
  ordered_json j;
  j["version"] = "relblow 0.1.0";
  j["mode"] = cli::to_string(mode);
  j["seed"] = seed;
  j["gas"] = {{"gamma", gas.gamma}, {"c", gas.c},     {"k", gas.k},
              {"R", gas.R},         {"B", gas.B},     {"Cv", gas.cv()},
              {"law", isentropic ? "isentropic" : "full"}};
  j["grid"] = {{"x_min", grid.x_min},
               {"x_max", grid.x_max},
               {"cells", grid.cells},
               {"boundary", grid.bc == Bc::periodic ? "periodic" : "outflow"}};
  j["time"] = {{"t_end", t_end}, {"cfl", cfl}, {"output_dt", output_dt}};
  auto prof = [&](const ProfileSpec& p) {
    return ordered_json{{"family", family_name(p.family)},
                        {"base", p.base},
                        {"amp", p.amp},
                        {"x0", p.x0},
                        {"width", p.width}};
  };
  j["initial"] = {{"preset", preset},
                  {"csv", initial_csv},
                  {"samples", data_samples},
                  {"rho", prof(profiles.rho)},
                  {"u", prof(profiles.u)},
                  {"S", prof(profiles.S)}};
  j["outputs"] = {{"dir", out_dir}};
  j["verify"] = {{"samples", verify_samples}};
  if (mode == RunMode::sweep) {
    j["sweep"] = {{"key", sweep_key}, {"values", sweep_values}};
  }
  return j.dump(2);
}

RunConfig resolve_config(RunMode mode, const std::optional<std::string>& config_path,
                         const std::vector<std::string>& overrides,
                         const std::optional<std::string>& out_dir,
                         const std::optional<std::uint64_t>& seed) {
  ConfigMap m;
  if (config_path) m = ConfigMap::parse_file(*config_path);
  for (const auto& ov : overrides) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw config_error("--set expects key=value, got '" + ov + "'");
    m.set_from_string(ov.substr(0, eq), ov.substr(eq + 1));
  }

  RunConfig cfg;
  cfg.mode = mode;
  cfg.preset = m.str("initial.preset", "");
  apply_preset(cfg);

  cfg.gas.gamma = m.number("gas.gamma", cfg.gas.gamma);
  cfg.gas.c = m.number("gas.c", cfg.gas.c);
  cfg.gas.k = m.number("gas.k", cfg.gas.k);
  cfg.gas.R = m.number("gas.R", cfg.gas.R);
  cfg.gas.B = m.number("gas.B", cfg.gas.B);
  const std::string law = m.str("gas.law", cfg.isentropic ? "isentropic" : "full");
  if (law == "isentropic")
    cfg.isentropic = true;
  else if (law == "full")
    cfg.isentropic = false;
  else
    throw config_error("config: gas.law must be 'isentropic' or 'full'");

  cfg.grid.x_min = m.number("grid.x_min", cfg.grid.x_min);
  cfg.grid.x_max = m.number("grid.x_max", cfg.grid.x_max);
  cfg.grid.cells = static_cast<int>(m.number("grid.cells", cfg.grid.cells));
  const std::string bc =
      m.str("grid.boundary", cfg.grid.bc == Bc::periodic ? "periodic" : "outflow");
  if (bc == "periodic")
    cfg.grid.bc = Bc::periodic;
  else if (bc == "outflow")
    cfg.grid.bc = Bc::outflow;
  else
    throw config_error("config: grid.boundary must be 'periodic' or 'outflow'");

  cfg.t_end = m.number("time.t_end", cfg.t_end);
  cfg.cfl = m.number("time.cfl", cfg.cfl);
  cfg.output_dt = m.number("time.output_dt", cfg.output_dt);

  cfg.initial_csv = m.str("initial.csv", cfg.initial_csv);
  cfg.data_samples = static_cast<int>(m.number("initial.samples", cfg.data_samples));
  cfg.profiles.rho = profile_from(m, "initial.rho", cfg.profiles.rho);
  cfg.profiles.u = profile_from(m, "initial.u", cfg.profiles.u);
  cfg.profiles.S = profile_from(m, "initial.S", cfg.profiles.S);

  cfg.out_dir = m.str("outputs.dir", cfg.out_dir);
  cfg.seed = static_cast<std::uint64_t>(m.number("seed", static_cast<double>(cfg.seed)));
  cfg.verify_samples = static_cast<int>(m.number("verify.samples", cfg.verify_samples));

  cfg.sweep_key = m.str("sweep.key", "");
  cfg.sweep_values = m.numbers("sweep.values");

  if (out_dir) cfg.out_dir = *out_dir;
  if (seed) cfg.seed = *seed;

  // validation
  cfg.gas.validate();
  if (!(cfg.grid.x_max > cfg.grid.x_min)) throw config_error("config: empty domain");
  if (cfg.grid.cells < 8) throw config_error("config: grid.cells must be >= 8");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw config_error("config: cfl must be in (0,1)");
  if (!(cfg.t_end > 0.0)) throw config_error("config: t_end must be positive");
  if (mode == RunMode::sweep && (cfg.sweep_key.empty() || cfg.sweep_values.empty()))
    throw config_error("config: sweep mode needs sweep.key and sweep.values");
  return cfg;
}

}  // namespace relblow::cli
