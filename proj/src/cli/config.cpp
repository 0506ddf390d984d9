#include "nhmf/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace nhmf::cli {

using nlohmann::json;

namespace {

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("config: '" + key + "' must be a number or [re, im]");
}

double number_from(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return j.get<double>();
}

int int_from(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
  return j.get<int>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("config: unknown key '" + where + "." + k + "'");
}

}  // namespace

std::vector<double> URange::grid() const {
  if (!(step > 0.0) || !(max >= min) || min < 0.0)
    throw ConfigError("U range: need 0 <= u-min <= u-max and u-step > 0");
  const auto n = static_cast<long>(std::floor((max - min) / step + 1e-9));
  std::vector<double> g;
  for (long k = 0; k <= n; ++k) g.push_back(min + static_cast<double>(k) * step);
  return g;
}

void RunConfig::resolve(const std::string& command) {
  if (command == "case-study" && !u) u = 0.5;
  if (command == "transmission" && !u) u = 0.2;
  if (!u_range) {
    if (command == "exact-sweep") u_range = URange{0.0, 10.0, 0.01};
    if (command == "hmf-sweep") u_range = URange{0.0, 10.0, 0.05};
    if (command == "nhmf-sweep") u_range = URange{0.05, 10.0, 0.05};
  }
  if (u_range) u_range->grid();
  if (u) {
    if (!(*u >= 0.0) || !std::isfinite(*u)) throw ConfigError("--u must be finite and >= 0");
    if (command == "case-study" && !(*u > 0.0)) throw ConfigError("case-study needs u > 0");
  }
  if (!(model.t > 0.0) || !std::isfinite(model.t)) throw ConfigError("t must be positive");
  if (hmf_grid < 8) throw ConfigError("hmf_grid must be at least 8");
  if (search.random_starts < 0) throw ConfigError("--starts must be >= 0");
  if (command == "transmission") {
    try {
      ssp().validate();
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  }
}

SSPConfig RunConfig::ssp() const {
  SSPConfig c;
  c.beta = beta;
  try {
    c.e_grid = SSPConfig::grid(e_min, e_max, e_step);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (shift) {
    c.shift_mode = ShiftMode::Fixed;
    c.shift_value = *shift;
  }
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["model"] = {{"t", model.t},
                {"h_up_a", complex_json(model.h_up_a)},
                {"h_up_b", complex_json(model.h_up_b)},
                {"h_dn_a", complex_json(model.h_dn_a)},
                {"h_dn_b", complex_json(model.h_dn_b)}};
  j["search"] = {{"seed", search.rng_seed},
                 {"starts", search.random_starts},
                 {"newton_tol", search.newton_tol},
                 {"max_iter", search.max_iter},
                 {"dedupe_tol", search.dedupe_tol}};
  j["hmf_grid"] = hmf_grid;
  if (u) j["u"] = *u;
  if (u_range) j["u_range"] = {{"min", u_range->min}, {"max", u_range->max}, {"step", u_range->step}};
  j["ssp"] = {{"beta", beta}, {"e_min", e_min}, {"e_max", e_max}, {"e_step", e_step}};
  j["ssp"]["shift"] = shift ? json(*shift) : json("auto");
  j["format"] = format == Format::Csv ? "csv" : "json";
  j["plot"] = plot;
  return j;
}

void apply_json(RunConfig& cfg, const json& j) {
  check_keys(j, {"model", "search", "hmf_grid", "u", "u_range", "ssp", "format", "out", "plot"}, "root");
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, {"t", "h_up_a", "h_up_b", "h_dn_a", "h_dn_b"}, "model");
    if (m.contains("t")) cfg.model.t = number_from(m["t"], "model.t");
    if (m.contains("h_up_a")) cfg.model.h_up_a = complex_from(m["h_up_a"], "model.h_up_a");
    if (m.contains("h_up_b")) cfg.model.h_up_b = complex_from(m["h_up_b"], "model.h_up_b");
    if (m.contains("h_dn_a")) cfg.model.h_dn_a = complex_from(m["h_dn_a"], "model.h_dn_a");
    if (m.contains("h_dn_b")) cfg.model.h_dn_b = complex_from(m["h_dn_b"], "model.h_dn_b");
  }
  if (j.contains("search")) {
    const auto& s = j["search"];
    check_keys(s, {"seed", "starts", "newton_tol", "max_iter", "dedupe_tol"}, "search");
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw ConfigError("config: 'search.seed' must be a nonnegative integer");
      cfg.search.rng_seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("starts")) cfg.search.random_starts = int_from(s["starts"], "search.starts");
    if (s.contains("newton_tol")) cfg.search.newton_tol = number_from(s["newton_tol"], "search.newton_tol");
    if (s.contains("max_iter")) cfg.search.max_iter = int_from(s["max_iter"], "search.max_iter");
    if (s.contains("dedupe_tol")) cfg.search.dedupe_tol = number_from(s["dedupe_tol"], "search.dedupe_tol");
  }
  if (j.contains("hmf_grid")) cfg.hmf_grid = int_from(j["hmf_grid"], "hmf_grid");
  if (j.contains("u")) cfg.u = number_from(j["u"], "u");
  if (j.contains("u_range")) {
    const auto& r = j["u_range"];
    check_keys(r, {"min", "max", "step"}, "u_range");
    URange ur = cfg.u_range.value_or(URange{});
    if (r.contains("min")) ur.min = number_from(r["min"], "u_range.min");
    if (r.contains("max")) ur.max = number_from(r["max"], "u_range.max");
    if (r.contains("step")) ur.step = number_from(r["step"], "u_range.step");
    cfg.u_range = ur;
  }
  if (j.contains("ssp")) {
    const auto& s = j["ssp"];
    check_keys(s, {"beta", "e_min", "e_max", "e_step", "shift"}, "ssp");
    if (s.contains("beta")) cfg.beta = number_from(s["beta"], "ssp.beta");
    if (s.contains("e_min")) cfg.e_min = number_from(s["e_min"], "ssp.e_min");
    if (s.contains("e_max")) cfg.e_max = number_from(s["e_max"], "ssp.e_max");
    if (s.contains("e_step")) cfg.e_step = number_from(s["e_step"], "ssp.e_step");
    if (s.contains("shift")) {
      if (s["shift"] == "auto") cfg.shift.reset();
      else cfg.shift = number_from(s["shift"], "ssp.shift");
    }
  }
  if (j.contains("format")) {
    if (j["format"] == "csv") cfg.format = Format::Csv;
    else if (j["format"] == "json") cfg.format = Format::Json;
    else throw ConfigError("config: 'format' must be \"csv\" or \"json\"");
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("config: 'out' must be a string");
    cfg.out = j["out"].get<std::string>();
  }
  if (j.contains("plot")) {
    if (!j["plot"].is_boolean()) throw ConfigError("config: 'plot' must be a boolean");
    cfg.plot = j["plot"].get<bool>();
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  apply_json(cfg, j);
}

}  // namespace nhmf::cli
