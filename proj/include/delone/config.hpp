#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delone/contfrac.hpp"
#include "delone/error.hpp"
#include "delone/generators.hpp"
#include "delone/io.hpp"

namespace delone {

/// Everything one CLI run depends on. Written verbatim into every output so a
/// result file can be regenerated from its own header.
struct RunConfig {
  std::string command;
  std::string set = "fibonacci";
  Json params = Json::object();
  std::vector<double> T;
  std::vector<double> U;
  std::optional<double> window;  // half-side of the analysis cube
  double growth = 2.0;
  int budget = 4;  // window doublings
  std::uint64_t seed = 0;
  std::string out;
  std::string format;  // csv | json; empty picks the command default
  std::string weight = "point-count";
  int axis = 1;
  double k_from = 0.0, k_to = 3.0, k_pitch = 0.01;
  double peak_ratio = 0.2;
  std::string construction = "all";

  Json to_json() const {
    Json j = {{"command", command}, {"set", set},     {"params", params}, {"T", T},
              {"U", U},             {"growth", growth}, {"budget", budget}, {"seed", seed},
              {"format", format},   {"weight", weight}, {"axis", axis},     {"peak_ratio", peak_ratio},
              {"k", {{"from", k_from}, {"to", k_to}, {"pitch", k_pitch}}},  {"construction", construction}};
    j["window"] = window ? Json(*window) : Json(nullptr);
    return j;
  }
};

namespace detail {

template <class T>
void read_key(const Json& j, const char* key, T& into) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  into = get_as<T>(*it, std::string("config.") + key);
}

}  // namespace detail

/// Fills `cfg` from a config object. Unknown keys are rejected by name so a
/// typo cannot silently fall back to a default.
inline void apply_config_json(const Json& j, RunConfig& cfg) {
  require(j.is_object(), ErrorKind::schema, "config must be a JSON object");
  static const std::set<std::string> known{"command", "set",  "params", "T",      "U",          "window",
                                           "growth",  "budget", "seed", "out",    "format",     "weight",
                                           "axis",    "k",    "peak_ratio", "construction"};
  for (auto it = j.begin(); it != j.end(); ++it)
    require(known.count(it.key()) > 0, ErrorKind::schema, "unknown field 'config." + it.key() + "'");
  detail::read_key(j, "command", cfg.command);
  detail::read_key(j, "set", cfg.set);
  if (j.contains("params")) {
    require(j["params"].is_object(), ErrorKind::schema, "field 'config.params' must be an object");
    cfg.params = j["params"];
  }
  detail::read_key(j, "T", cfg.T);
  detail::read_key(j, "U", cfg.U);
  if (j.contains("window") && !j["window"].is_null())
    cfg.window = detail::get_as<double>(j["window"], "config.window");
  detail::read_key(j, "growth", cfg.growth);
  detail::read_key(j, "budget", cfg.budget);
  detail::read_key(j, "seed", cfg.seed);
  detail::read_key(j, "out", cfg.out);
  detail::read_key(j, "format", cfg.format);
  detail::read_key(j, "weight", cfg.weight);
  detail::read_key(j, "axis", cfg.axis);
  detail::read_key(j, "peak_ratio", cfg.peak_ratio);
  detail::read_key(j, "construction", cfg.construction);
  if (j.contains("k")) {
    const Json& k = j["k"];
    require(k.is_object(), ErrorKind::schema, "field 'config.k' must be an object");
    detail::read_key(k, "from", cfg.k_from);
    detail::read_key(k, "to", cfg.k_to);
    detail::read_key(k, "pitch", cfg.k_pitch);
  }
}

inline void validate_config(const RunConfig& cfg) {
  auto positive_increasing = [](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      require(v[i] > 0.0, ErrorKind::schema, std::string("field '") + name + "' entries must be positive");
      require(i == 0 || v[i] > v[i - 1], ErrorKind::schema, std::string("field '") + name + "' must increase");
    }
  };
  positive_increasing(cfg.T, "T");
  positive_increasing(cfg.U, "U");
  require(!cfg.window || *cfg.window > 0.0, ErrorKind::schema, "field 'window' must be positive");
  require(cfg.growth > 1.0, ErrorKind::schema, "field 'growth' must exceed 1");
  require(cfg.budget >= 0, ErrorKind::schema, "field 'budget' must be >= 0");
  require(cfg.format.empty() || cfg.format == "csv" || cfg.format == "json", ErrorKind::schema,
          "field 'format' must be csv or json");
  require(cfg.k_pitch > 0.0 && cfg.k_to >= cfg.k_from, ErrorKind::schema, "field 'k' needs from <= to, pitch > 0");
}

namespace detail {

inline ContinuedFraction alpha_param(const Json& p, const std::string& where) {
  const Json& a = field(p, "alpha", where);
  if (a.is_string()) return parse_alpha(a.get<std::string>());
  if (a.is_number()) return ContinuedFraction::from_decimal(a.get<double>());
  fail(ErrorKind::schema, "field '" + where + ".alpha' must be a string or a number");
}

}  // namespace detail

/// Generator by name: zn, fibonacci, beatty, cut-project, product,
/// deleted-lines, two-color.
inline PointSetSource source_from_descriptor(const std::string& name, const Json& params) {
  const std::string where = "params";
  require(params.is_object(), ErrorKind::schema, "field 'params' must be an object");
  try {
    if (name == "zn") {
      int n = params.value("n", 1);
      std::vector<IVec> del;
      if (params.contains("deletions"))
        del = detail::get_as<std::vector<IVec>>(params["deletions"], where + ".deletions");
      return gen_integer_lattice(n, del);
    }
    if (name == "fibonacci") return gen_fibonacci();
    if (name == "beatty")
      return gen_beatty(detail::alpha_param(params, where),
                        detail::get_as<double>(detail::field(params, "tau", where), where + ".tau"));
    if (name == "cut-project") return gen_cut_project_1d(detail::alpha_param(params, where));
    if (name == "deleted-lines")
      return gen_deleted_lines(
          detail::get_as<std::vector<std::int64_t>>(detail::field(params, "a", where), where + ".a"));
    if (name == "two-color") {
      TwoColorParams tc;
      tc.n = params.value("n", 1);
      tc.a = detail::get_as<std::vector<std::int64_t>>(detail::field(params, "a", where), where + ".a");
      if (params.contains("product_floor"))
        tc.product_floor = detail::get_as<double>(params["product_floor"], where + ".product_floor");
      return gen_two_color(tc);
    }
    if (name == "product") {
      const Json& f = detail::field(params, "factors", where);
      require(f.is_array(), ErrorKind::schema, "field 'params.factors' must be an array");
      std::vector<PointSetSource> parts;
      for (const auto& d : f)
        parts.push_back(source_from_descriptor(detail::get_as<std::string>(detail::field(d, "name", "factor"), "factor.name"),
                                               d.value("params", Json::object())));
      return gen_product(std::move(parts));
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::schema, "params for '" + name + "': " + e.what());
  }
  fail(ErrorKind::schema, "unknown set '" + name + "' (zn, fibonacci, beatty, cut-project, product, deleted-lines, two-color)");
}

/// Exit status of the CLI for a library error: 1 bad config, 2 window or
/// resource budget, 3 file I/O.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return 3;
    case ErrorKind::resource_limit:
    case ErrorKind::window_too_small:
    case ErrorKind::insufficient_window:
    case ErrorKind::window_incomplete: return 2;
    default: return 1;
  }
}

}  // namespace delone
