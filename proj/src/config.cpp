#include "csh/config.hpp"

#include <fstream>
#include <set>

namespace csh {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : "; ") + e;
  return s;
}

class Reader {
 public:
  std::vector<std::string> issues;

  void object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      issues.push_back(path + ": expected an object");
      return;
    }
    for (const auto& [k, v] : j.items())
      if (!allowed.count(k)) issues.push_back(path + "." + k + ": unknown key");
  }

  void number(const json& j, const std::string& key, const std::string& path, double& out) {
    if (!j.is_object() || !j.contains(key)) return;
    const json& v = j[key];
    if (!v.is_number()) {
      issues.push_back(path + "." + key + ": expected a number");
      return;
    }
    out = v.get<double>();
  }

  template <class Int>
  void integer(const json& j, const std::string& key, const std::string& path, Int& out) {
    if (!j.is_object() || !j.contains(key)) return;
    const json& v = j[key];
    if (!v.is_number_integer()) {
      issues.push_back(path + "." + key + ": expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0) {
        out = v.get<Int>();
      } else {
        issues.push_back(path + "." + key + ": expected a non-negative integer");
      }
    } else {
      out = v.get<Int>();
    }
  }

  void boolean(const json& j, const std::string& key, const std::string& path, bool& out) {
    if (!j.is_object() || !j.contains(key)) return;
    const json& v = j[key];
    if (!v.is_boolean()) {
      issues.push_back(path + "." + key + ": expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  template <class Enum, class Parse>
  void choice(const json& j, const std::string& key, const std::string& path, Enum& out, Parse parse) {
    if (!j.is_object() || !j.contains(key)) return;
    const json& v = j[key];
    if (!v.is_string()) {
      issues.push_back(path + "." + key + ": expected a string");
      return;
    }
    try {
      out = parse(v.get<std::string>());
    } catch (const DomainError& e) {
      issues.push_back(path + "." + key + ": " + e.what());
    }
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v) : Error("invalid config: " + join(v)), issues(std::move(v)) {}

ordered_json to_json(const InitialDataSpec& d) {
  ordered_json j;
  j["family"] = to_string(d.family);
  j["amplitude"] = d.amplitude;
  j["width"] = d.width;
  j["center"] = {d.center1, d.center2};
  j["winding"] = d.winding;
  j["velocity"] = to_string(d.velocity);
  j["ring_radius"] = d.ring_radius;
  j["k_cut"] = d.k_cut;
  return j;
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["version"] = kConfigVersion;
  j["p"] = c.p;
  j["grid"] = {{"n", c.n}, {"L", c.L}};
  j["cfl"] = c.cfl;
  j["t_final"] = c.t_final;
  j["snapshot_every"] = c.snapshot_every;
  j["diag_every"] = c.diag_every;
  j["seed"] = c.seed;
  j["flat"] = c.flat;
  j["nonlinear"] = c.nonlinear;
  j["data"] = to_json(c.data);
  const DiagnosticToggles& t = c.toggles;
  j["diagnostics"] = {{"constraints", t.constraints}, {"temporal", t.temporal},
                      {"conformal", t.conformal},     {"weighted", t.weighted},
                      {"second_energy", t.second_energy}, {"null_flux", t.null_flux},
                      {"cs_force", t.cs_force}};
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader r;
  r.object(j, "config", {"version", "p", "grid", "cfl", "t_final", "snapshot_every", "diag_every", "seed", "flat",
                         "nonlinear", "data", "diagnostics"});
  if (!j.is_object()) throw ConfigError(r.issues);
  int version = kConfigVersion;
  r.integer(j, "version", "config", version);
  if (version != kConfigVersion)
    r.issues.push_back("config.version: unsupported version " + std::to_string(version));
  r.number(j, "p", "config", c.p);
  if (j.contains("grid")) {
    r.object(j["grid"], "config.grid", {"n", "L"});
    r.integer(j["grid"], "n", "config.grid", c.n);
    r.number(j["grid"], "L", "config.grid", c.L);
  }
  r.number(j, "cfl", "config", c.cfl);
  r.number(j, "t_final", "config", c.t_final);
  r.integer(j, "snapshot_every", "config", c.snapshot_every);
  r.integer(j, "diag_every", "config", c.diag_every);
  r.integer(j, "seed", "config", c.seed);
  r.boolean(j, "flat", "config", c.flat);
  r.boolean(j, "nonlinear", "config", c.nonlinear);
  if (j.contains("data")) {
    const json& d = j["data"];
    r.object(d, "config.data",
             {"family", "amplitude", "width", "center", "winding", "velocity", "ring_radius", "k_cut"});
    r.choice(d, "family", "config.data", c.data.family, family_from_string);
    r.number(d, "amplitude", "config.data", c.data.amplitude);
    r.number(d, "width", "config.data", c.data.width);
    if (d.is_object() && d.contains("center")) {
      const json& ce = d["center"];
      if (ce.is_array() && ce.size() == 2 && ce[0].is_number() && ce[1].is_number()) {
        c.data.center1 = ce[0].get<double>();
        c.data.center2 = ce[1].get<double>();
      } else {
        r.issues.push_back("config.data.center: expected [x1, x2]");
      }
    }
    r.integer(d, "winding", "config.data", c.data.winding);
    r.choice(d, "velocity", "config.data", c.data.velocity, velocity_from_string);
    r.number(d, "ring_radius", "config.data", c.data.ring_radius);
    r.number(d, "k_cut", "config.data", c.data.k_cut);
  }
  if (j.contains("diagnostics")) {
    const json& d = j["diagnostics"];
    r.object(d, "config.diagnostics",
             {"constraints", "temporal", "conformal", "weighted", "second_energy", "null_flux", "cs_force"});
    DiagnosticToggles& t = c.toggles;
    r.boolean(d, "constraints", "config.diagnostics", t.constraints);
    r.boolean(d, "temporal", "config.diagnostics", t.temporal);
    r.boolean(d, "conformal", "config.diagnostics", t.conformal);
    r.boolean(d, "weighted", "config.diagnostics", t.weighted);
    r.boolean(d, "second_energy", "config.diagnostics", t.second_energy);
    r.boolean(d, "null_flux", "config.diagnostics", t.null_flux);
    r.boolean(d, "cs_force", "config.diagnostics", t.cs_force);
  }
  if (!r.issues.empty()) throw ConfigError(r.issues);
  c.data.seed = c.seed;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open"});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return run_config_from_json(j);
}

RunConfig load_and_validate(const std::filesystem::path& path) {
  RunConfig c = load_run_config(path);
  try {
    validate(c);
  } catch (const DomainError& e) {
    throw ConfigError({e.what()});
  }
  return c;
}

}  // namespace csh
