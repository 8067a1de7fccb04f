#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qlyap/errors.hpp"
#include "qlyap/floquet.hpp"
#include "qlyap/growth.hpp"
#include "qlyap/rho0.hpp"
#include "qlyap/version.hpp"

namespace qlyap {

using json = nlohmann::ordered_json;

struct SweepSpec {
  std::string parameter;        // dotted path into the config document
  std::vector<double> values;
};

struct SpectralSpec {
  int bins = 8;
  int compare_steps = 10;       // steps reconstructed and compared to direct
};

struct RunConfig {
  std::string name;
  ModelSpec model;
  Rho0Spec rho0;
  Eigen::Vector2d beta0{0.0, 0.0};
  int steps = 20;
  FitOptions fit;
  std::optional<SweepSpec> sweep;
  SpectralSpec spectral;
  json canonical;     // normalized echo of the parsed document
  std::string hash;   // fnv1a-64 of the canonical dump, hex
};

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace detail {

inline void check_keys(const json& j, const std::string& where,
                       const std::set<std::string>& allowed) {
  require(j.is_object(), where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    require(allowed.count(key) != 0, "unknown key '" + key + "' in " + where);
  }
}

inline double get_num(const json& j, const std::string& where) {
  require(j.is_number(), where + " must be a number");
  return j.get<double>();
}

inline int get_int(const json& j, const std::string& where) {
  require(j.is_number_integer(), where + " must be an integer");
  return j.get<int>();
}

inline Eigen::Vector2d get_vec2(const json& j, const std::string& where) {
  require(j.is_array() && j.size() == 2, where + " must be [a, b]");
  return {get_num(j[0], where), get_num(j[1], where)};
}

inline std::vector<AxisHarmonic> parse_axis_harmonics(const json& j,
                                                      const std::string& where) {
  require(j.is_array(), where + " must be an array of harmonics");
  std::vector<AxisHarmonic> one_sided;
  std::set<int> seen;
  for (const auto& e : j) {
    check_keys(e, where + " entry", {"m", "re", "im"});
    AxisHarmonic h;
    h.m = get_int(e.at("m"), where + ".m");
    require(h.m >= 0, where + ".m must be >= 0");
    require(seen.insert(h.m).second, where + " has a duplicate m");
    const double re = e.contains("re") ? get_num(e.at("re"), where) : 0.0;
    const double im = e.contains("im") ? get_num(e.at("im"), where) : 0.0;
    h.c = cplx(re, im);
    one_sided.push_back(h);
  }
  return hermitian_complete(one_sided);
}

inline std::vector<CoupledHarmonic> parse_coupled_harmonics(
    const json& j, const std::string& where) {
  require(j.is_array(), where + " must be an array of harmonics");
  std::vector<CoupledHarmonic> out;
  for (const auto& e : j) {
    check_keys(e, where + " entry", {"m1", "m2", "re", "im"});
    CoupledHarmonic h;
    h.m1 = get_int(e.at("m1"), where + ".m1");
    h.m2 = get_int(e.at("m2"), where + ".m2");
    require(h.m1 != 0 || h.m2 != 0, where + " entries need (m1, m2) != 0");
    const double re = e.contains("re") ? get_num(e.at("re"), where) : 0.0;
    const double im = e.contains("im") ? get_num(e.at("im"), where) : 0.0;
    h.c = cplx(re, im);
    out.push_back(h);
    out.push_back({-h.m1, -h.m2, std::conj(h.c)});
  }
  return out;
}

inline ModelSpec parse_model(const json& j) {
  check_keys(j, "model", {"type", "cutoff", "tau", "kick"});
  ModelSpec m;
  const std::string type = j.at("type").get<std::string>();
  if (type == "free")
    m.type = ModelType::kFree;
  else if (type == "position_kick")
    m.type = ModelType::kPositionKick;
  else if (type == "cat")
    m.type = ModelType::kCatMap;
  else
    throw ConfigError("model.type must be free, position_kick, or cat");

  m.cutoff = get_int(j.at("cutoff"), "model.cutoff");
  require(m.cutoff >= 1 && m.cutoff <= 128, "model.cutoff must be in [1, 128]");

  const json& tau = j.at("tau");
  if (tau.is_number()) {
    m.resonant = false;
    m.tau_value = tau.get<double>();
    require(m.tau_value > 0.0, "model.tau must be positive");
  } else {
    check_keys(tau, "model.tau", {"resonant", "multiple", "value"});
    m.resonant = tau.at("resonant").get<bool>();
    if (m.resonant) {
      m.resonant_multiple =
          tau.contains("multiple") ? tau.at("multiple").get<long long>() : 1;
      require(m.resonant_multiple >= 1, "model.tau.multiple must be >= 1");
      require(!tau.contains("value"),
              "model.tau.value conflicts with resonant = true");
    } else {
      require(tau.contains("value"),
              "non-resonant model.tau needs a value field");
      m.tau_value = get_num(tau.at("value"), "model.tau.value");
      require(m.tau_value > 0.0, "model.tau.value must be positive");
    }
  }

  if (m.type == ModelType::kPositionKick) {
    require(j.contains("kick"), "position_kick model needs a kick block");
    const json& k = j.at("kick");
    check_keys(k, "model.kick", {"alpha", "g"});
    m.kick.alpha = get_num(k.at("alpha"), "model.kick.alpha");
    require(std::isfinite(m.kick.alpha), "model.kick.alpha must be finite");
    const json& g = k.at("g");
    check_keys(g, "model.kick.g", {"axis1", "axis2", "coupled"});
    if (g.contains("axis1"))
      m.kick.axis1 = parse_axis_harmonics(g.at("axis1"), "model.kick.g.axis1");
    if (g.contains("axis2"))
      m.kick.axis2 = parse_axis_harmonics(g.at("axis2"), "model.kick.g.axis2");
    if (g.contains("coupled"))
      m.kick.coupled =
          parse_coupled_harmonics(g.at("coupled"), "model.kick.g.coupled");
    require(!m.kick.empty(), "model.kick.g must define at least one harmonic");
  } else {
    require(!j.contains("kick"),
            std::string("model.kick is only valid for position_kick, not ") +
                type);
  }
  return m;
}

inline Rho0Spec parse_rho0(const json& j) {
  check_keys(j, "rho0", {"p0", "q0", "v1", "v2", "k_window", "fd_step"});
  Rho0Spec r;
  const json& p0 = j.at("p0");
  require(p0.is_array() && p0.size() == 2, "rho0.p0 must be [int, int]");
  r.p0 = {get_int(p0[0], "rho0.p0"), get_int(p0[1], "rho0.p0")};
  r.q0 = get_vec2(j.at("q0"), "rho0.q0");
  r.v1 = get_vec2(j.at("v1"), "rho0.v1");
  r.v2 = get_vec2(j.at("v2"), "rho0.v2");
  r.k_window = get_int(j.at("k_window"), "rho0.k_window");
  require(r.k_window >= 0 && r.k_window <= 64,
          "rho0.k_window must be in [0, 64]");
  if (j.contains("fd_step")) {
    r.fd_step = get_num(j.at("fd_step"), "rho0.fd_step");
    require(r.fd_step > 0.0 && r.fd_step < 0.25,
            "rho0.fd_step must be in (0, 0.25)");
  }
  require(r.uses_v1() || r.uses_v2(), "rho0 needs v1 or v2 non-zero");
  return r;
}

inline json axis_harmonics_json(const std::vector<AxisHarmonic>& g) {
  json out = json::array();
  for (const auto& h : g) {
    if (h.m < 0) continue;  // canonical form stores the one-sided half
    out.push_back({{"m", h.m}, {"re", h.c.real()}, {"im", h.c.imag()}});
  }
  return out;
}

inline json coupled_harmonics_json(const std::vector<CoupledHarmonic>& g) {
  json out = json::array();
  for (std::size_t i = 0; i < g.size(); i += 2)  // stored as (entry, mirror)
    out.push_back({{"m1", g[i].m1},
                   {"m2", g[i].m2},
                   {"re", g[i].c.real()},
                   {"im", g[i].c.imag()}});
  return out;
}

}  // namespace detail

// Canonical form: fixed key order and normalized values, so the hash is
// independent of input key order and formatting.
inline json canonical_json(const RunConfig& c) {
  json model;
  model["type"] = model_type_name(c.model.type);
  model["cutoff"] = c.model.cutoff;
  if (c.model.resonant)
    model["tau"] = {{"resonant", true}, {"multiple", c.model.resonant_multiple}};
  else
    model["tau"] = {{"resonant", false}, {"value", c.model.tau_value}};
  if (c.model.type == ModelType::kPositionKick) {
    json g;
    g["axis1"] = detail::axis_harmonics_json(c.model.kick.axis1);
    g["axis2"] = detail::axis_harmonics_json(c.model.kick.axis2);
    if (!c.model.kick.coupled.empty())
      g["coupled"] = detail::coupled_harmonics_json(c.model.kick.coupled);
    model["kick"] = {{"alpha", c.model.kick.alpha}, {"g", g}};
  }

  json rho0;
  rho0["p0"] = {c.rho0.p0[0], c.rho0.p0[1]};
  rho0["q0"] = {c.rho0.q0(0), c.rho0.q0(1)};
  rho0["v1"] = {c.rho0.v1(0), c.rho0.v1(1)};
  rho0["v2"] = {c.rho0.v2(0), c.rho0.v2(1)};
  rho0["k_window"] = c.rho0.k_window;
  rho0["fd_step"] = c.rho0.fd_step;

  json out;
  out["schema_version"] = kSchemaVersion;
  out["name"] = c.name;
  out["model"] = model;
  out["beta"] = {c.beta0(0), c.beta0(1)};
  out["rho0"] = rho0;
  out["run"] = {{"steps", c.steps},
                {"leakage_budget", c.fit.leakage_budget},
                {"fit_n_lo", c.fit.n_lo}};
  out["spectral"] = {{"bins", c.spectral.bins},
                     {"compare_steps", c.spectral.compare_steps}};
  if (c.sweep) {
    out["sweep"] = {{"parameter", c.sweep->parameter},
                    {"values", c.sweep->values}};
  }
  return out;
}

inline RunConfig parse_config(const json& j) {
  detail::check_keys(j, "config",
                     {"schema_version", "name", "model", "beta", "rho0", "run",
                      "sweep", "spectral"});
  if (j.contains("schema_version"))
    require(j.at("schema_version").get<int>() == kSchemaVersion,
            "unsupported schema_version");
  RunConfig c;
  require(j.contains("name") && j.at("name").is_string(),
          "config needs a string name");
  c.name = j.at("name").get<std::string>();
  require(!c.name.empty(), "config name must not be empty");
  c.model = detail::parse_model(j.at("model"));
  if (j.contains("beta")) {
    c.beta0 = detail::get_vec2(j.at("beta"), "beta");
    require(c.beta0(0) >= 0.0 && c.beta0(0) < 1.0 && c.beta0(1) >= 0.0 &&
                c.beta0(1) < 1.0,
            "beta components must lie in [0, 1)");
  }
  c.rho0 = detail::parse_rho0(j.at("rho0"));

  if (j.contains("run")) {
    const json& r = j.at("run");
    detail::check_keys(r, "run", {"steps", "leakage_budget", "fit_n_lo"});
    if (r.contains("steps")) {
      c.steps = detail::get_int(r.at("steps"), "run.steps");
      require(c.steps >= 1 && c.steps <= 100000,
              "run.steps must be in [1, 100000]");
    }
    if (r.contains("leakage_budget")) {
      c.fit.leakage_budget =
          detail::get_num(r.at("leakage_budget"), "run.leakage_budget");
      require(c.fit.leakage_budget >= 0.0 && c.fit.leakage_budget <= 1.0,
              "run.leakage_budget must be in [0, 1]");
    }
    if (r.contains("fit_n_lo")) {
      c.fit.n_lo = detail::get_int(r.at("fit_n_lo"), "run.fit_n_lo");
      require(c.fit.n_lo >= 1, "run.fit_n_lo must be >= 1");
    }
  }

  if (j.contains("spectral")) {
    const json& s = j.at("spectral");
    detail::check_keys(s, "spectral", {"bins", "compare_steps"});
    if (s.contains("bins"))
      c.spectral.bins = detail::get_int(s.at("bins"), "spectral.bins");
    require(c.spectral.bins >= 2 && c.spectral.bins <= 256,
            "spectral.bins must be in [2, 256]");
    if (s.contains("compare_steps"))
      c.spectral.compare_steps =
          detail::get_int(s.at("compare_steps"), "spectral.compare_steps");
    require(c.spectral.compare_steps >= 1 && c.spectral.compare_steps <= 1000,
            "spectral.compare_steps must be in [1, 1000]");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    detail::check_keys(s, "sweep", {"parameter", "values"});
    SweepSpec sw;
    sw.parameter = s.at("parameter").get<std::string>();
    require(!sw.parameter.empty(), "sweep.parameter must not be empty");
    require(s.at("values").is_array() && !s.at("values").empty(),
            "sweep.values must be a non-empty array");
    for (const auto& v : s.at("values"))
      sw.values.push_back(detail::get_num(v, "sweep.values"));
    c.sweep = sw;
  }

  c.canonical = canonical_json(c);
  std::ostringstream hex;
  hex << std::hex << fnv1a64(c.canonical.dump());
  c.hash = hex.str();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

}  // namespace qlyap
