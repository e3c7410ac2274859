// delone_lab: generate Delone-set constructions and analyse finite windows.
//
// Exit status: 0 success, 1 bad config, 2 window/resource budget exhausted,
// 3 file I/O, 4 a verification criterion failed.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "delone/delone.hpp"

using namespace delone;

namespace {

constexpr int exit_verify_failed = 4;

/// Shortest round-trip decimal form, so repeated runs print identical bytes.
std::string num(double v) { return Json(v).dump(); }

/// Plot interchange: one '#'-prefixed JSON header line, a column line, rows.
class CsvWriter {
 public:
  CsvWriter(const RunConfig& cfg, std::vector<std::string> columns) : columns_(std::move(columns)) {
    Json header = {{"config", cfg.to_json()}, {"columns", columns_}};
    out_ << "# " << header.dump() << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    require(cells.size() == columns_.size(), ErrorKind::invalid_argument, "csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

  std::string str() const { return out_.str(); }

 private:
  std::vector<std::string> columns_;
  std::ostringstream out_;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) std::cout << text;
  else write_text_file(cfg.out, text);
}

void emit_json(const RunConfig& cfg, Json j) {
  j["config"] = cfg.to_json();
  emit(cfg, j.dump(2) + "\n");
}

bool wants_json(const RunConfig& cfg, bool json_default) {
  return cfg.format.empty() ? json_default : cfg.format == "json";
}

std::vector<double> default_T(const RunConfig& cfg, std::vector<double> fallback) {
  if (!cfg.T.empty()) return cfg.T;
  // defaults sit just off the integers so no distance lands on the boundary
  for (double& t : fallback) t += 1e-6;
  return fallback;
}

std::vector<double> default_U(const RunConfig& cfg) {
  return cfg.U.empty() ? std::vector<double>{10.0, 20.0, 40.0, 80.0} : cfg.U;
}

Region cube_for(const PointSetSource& src, double half) { return Region::cube(src.dimension, half); }

int cmd_generate(const RunConfig& cfg) {
  auto src = source_from_descriptor(cfg.set, cfg.params);
  auto set = src.materialize(cube_for(src, cfg.window.value_or(50.0 * src.covering_hint)));
  if (wants_json(cfg, true)) {
    Json j = to_json(set);
    j["source"] = src.descriptor();
    emit_json(cfg, j);
    return 0;
  }
  std::vector<std::string> cols;
  for (int k = 0; k < set.rank(); ++k) cols.push_back("a" + std::to_string(k + 1));
  for (int k = 0; k < set.dimension(); ++k) cols.push_back("x" + std::to_string(k + 1));
  cols.push_back("tag");
  CsvWriter csv(cfg, cols);
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::vector<std::string> cells;
    for (auto a : set.address(i)) cells.push_back(std::to_string(a));
    for (double x : set.point(i)) cells.push_back(num(x));
    cells.push_back("exact");
    csv.row(cells);
  }
  emit(cfg, csv.str());
  return 0;
}

int cmd_atlas(const RunConfig& cfg) {
  auto src = source_from_descriptor(cfg.set, cfg.params);
  WindowPolicy policy{cfg.window.value_or(0.0), cfg.growth, cfg.budget};
  auto profile = patch_count_profile(src, default_T(cfg, {1.0, 2.0, 4.0, 8.0}), policy);
  bool exhausted = false;
  for (const auto& e : profile) exhausted = exhausted || !e.stabilized;
  if (wants_json(cfg, true)) {
    Json j = {{"source", src.descriptor()}, {"profile", Json::array()}, {"classes", Json::array()}};
    for (const auto& e : profile) {
      j["profile"].push_back({{"T", e.T}, {"N_lower", e.N_lower}, {"stabilized", e.stabilized}, {"window", e.window},
                              {"tag", "certified-bracket"}});
      auto atlas = compute_atlas(src.materialize(cube_for(src, e.window)), e.T);
      Json cls = Json::array();
      for (const auto& c : atlas.classes) cls.push_back({{"key_size", c.key.size()}, {"centers", c.centers.size()}});
      j["classes"].push_back({{"T", e.T}, {"flagged", atlas.flagged()}, {"classes", cls}});
    }
    emit_json(cfg, j);
  } else {
    CsvWriter csv(cfg, {"T", "N_lower", "stabilized", "window", "tag"});
    for (const auto& e : profile)
      csv.row({num(e.T), std::to_string(e.N_lower), e.stabilized ? "1" : "0", num(e.window), "certified-bracket"});
    emit(cfg, csv.str());
  }
  if (exhausted) {
    std::cerr << "delone_lab: window budget exhausted before N_X(T) stabilised\n";
    return 2;
  }
  return 0;
}

int cmd_repetitivity(const RunConfig& cfg) {
  auto src = source_from_descriptor(cfg.set, cfg.params);
  const int n = src.dimension;
  std::vector<GrowthSample> samples;
  CsvWriter csv(cfg, {"T", "M_lower", "M_upper", "N_lower", "T_over_3", "counting_bound", "tag"});
  Json rows = Json::array();
  for (double T : default_T(cfg, {1.0, 2.0, 4.0, 8.0})) {
    auto set = src.materialize(cube_for(src, cfg.window.value_or(std::max(50.0 * src.covering_hint, 40.0 * T))));
    auto r = repetitivity_function(set, T);
    const double bound = counting_lower_bound(delone_constants(set).r, r.N_lower, n);
    const char* tag = r.exact ? "exact" : "certified-bracket";
    csv.row({num(T), num(r.M_lower), num(r.M_upper), std::to_string(r.N_lower), num(T / 3.0), num(bound), tag});
    rows.push_back({{"T", T}, {"M_lower", r.M_lower}, {"M_upper", r.M_upper}, {"N_lower", r.N_lower},
                    {"T_over_3", T / 3.0}, {"counting_bound", bound}, {"flagged", r.flagged}, {"tag", tag}});
    samples.push_back({T, r.M_lower, static_cast<double>(r.N_lower)});
  }
  if (wants_json(cfg, false)) {
    Json j = {{"source", src.descriptor()}, {"rows", rows}};
    if (samples.size() >= 2) {
      auto g = classify_growth(samples, n);
      j["growth"] = {{"linear", to_string(g.linear)}, {"dense", g.dense}, {"slope_T", g.slope_T},
                     {"M_spread", g.M_spread}, {"caveat", g.caveat}};
    }
    emit_json(cfg, j);
  } else {
    emit(cfg, csv.str());
  }
  return 0;
}

int cmd_frequencies(const RunConfig& cfg) {
  auto src = source_from_descriptor(cfg.set, cfg.params);
  const double T = default_T(cfg, {2.0}).front();
  const auto U = default_U(cfg);
  const double half = cfg.window.value_or(U.back() + T + 2.0 * src.covering_hint + 1.0);
  auto set = src.materialize(cube_for(src, half));
  auto atlas = compute_atlas(set, T);
  std::vector<Region> regions;
  for (double u : U) regions.push_back(cube_for(src, u));
  CsvWriter csv(cfg, {"T", "class", "key_size", "U", "count", "frequency", "tag"});
  Json classes = Json::array();
  for (std::size_t c = 0; c < atlas.count(); ++c) {
    auto f = patch_frequency(set, atlas, atlas.classes[c].key, regions);
    Json rows = Json::array();
    for (std::size_t i = 0; i < U.size(); ++i) {
      csv.row({num(T), std::to_string(c), std::to_string(atlas.classes[c].key.size()), num(U[i]),
               std::to_string(f[i].count), num(f[i].frequency), "exact"});
      rows.push_back({{"U", U[i]}, {"count", f[i].count}, {"frequency", f[i].frequency}});
    }
    classes.push_back({{"class", c}, {"key_size", atlas.classes[c].key.size()}, {"rows", rows}});
  }
  if (wants_json(cfg, false)) emit_json(cfg, {{"source", src.descriptor()}, {"T", T}, {"classes", classes}});
  else emit(cfg, csv.str());
  return 0;
}

int cmd_wdist(const RunConfig& cfg) {
  const auto U = default_U(cfg);
  WeightDistribution w;
  Region window = Region::cube(1, 1.0);
  if (cfg.weight == "white-count") {
    require(cfg.set == "two-color", ErrorKind::schema, "weight 'white-count' needs --set two-color");
    TwoColorParams tc;
    tc.n = cfg.params.value("n", 1);
    tc.a = detail::get_as<std::vector<std::int64_t>>(detail::field(cfg.params, "a", "params"), "params.a");
    w = weight_white_count(tc);
    window = Region::cube(tc.n, cfg.window.value_or(4.0 * U.back()));
  } else {
    auto src = source_from_descriptor(cfg.set, cfg.params);
    window = cube_for(src, cfg.window.value_or(4.0 * U.back() + 10.0));
    if (cfg.weight == "volume") {
      w = weight_volume(src.dimension);
    } else {
      auto set = src.materialize(window);
      if (cfg.weight == "point-count") w = weight_point_count(set);
      else if (cfg.weight == "path-displacement") {
        auto map = build_address_map(set);
        w = path_displacement_distribution(set, map, cfg.axis);
        auto inner = window.eroded(2.0 * delone_constants(set).R_upper + 1.0);
        require(inner.has_value(), ErrorKind::window_too_small, "window too small for path lookups");
        window = *inner;
      } else {
        fail(ErrorKind::schema, "unknown weight '" + cfg.weight + "' (volume, point-count, white-count, path-displacement)");
      }
    }
  }
  DensityOptions opt;
  opt.seed = cfg.seed;
  auto prof = density_profile(w, window, U, opt);
  CsvWriter csv(cfg, {"U", "component", "f_plus", "f_minus", "f_zero", "delta", "boxes", "tag"});
  Json rows = Json::array();
  for (const auto& r : prof.rows)
    for (std::size_t c = 0; c < r.f_plus.size(); ++c) {
      csv.row({num(r.U), std::to_string(c), num(r.f_plus[c]), num(r.f_minus[c]), num(r.f_zero[c]), num(r.delta[c]),
               std::to_string(r.lattice_boxes + r.random_boxes), "sampled"});
      rows.push_back({{"U", r.U}, {"component", c}, {"f_plus", r.f_plus[c]}, {"f_minus", r.f_minus[c]},
                      {"f_zero", r.f_zero[c]}, {"delta", r.delta[c]}, {"tag", "sampled"}});
    }
  if (wants_json(cfg, false)) emit_json(cfg, {{"weight", w.name}, {"rows", rows}});
  else emit(cfg, csv.str());
  return 0;
}

int cmd_diffraction(const RunConfig& cfg) {
  auto src = source_from_descriptor(cfg.set, cfg.params);
  const double T = default_T(cfg, {20.0}).front();
  auto set = src.materialize(cube_for(src, cfg.window.value_or(T + 1.0)));
  auto ac = autocorrelation(set, T);
  std::vector<Vec> grid;
  for (const auto& k : line_grid(cfg.k_from, cfg.k_to, cfg.k_pitch)) {
    Vec v(src.dimension, 0.0);
    v[0] = k[0];  // cut along the first axis
    grid.push_back(v);
  }
  auto spec = diffraction_estimate(ac, grid);
  spec.pitch = cfg.k_pitch;
  auto peaks = detect_peaks(spec, cfg.peak_ratio);
  if (wants_json(cfg, false)) {
    Json pk = Json::array();
    for (auto i : peaks) pk.push_back(grid[i][0]);
    Json rows = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i][0], spec.intensity[i]});
    emit_json(cfg, {{"source", src.descriptor()}, {"T", T}, {"atoms", ac.atoms.size()}, {"max_imaginary", spec.max_imaginary},
                    {"peaks", pk}, {"intensity", rows}});
    return 0;
  }
  std::vector<std::string> cols;
  for (int a = 0; a < src.dimension; ++a) cols.push_back("k" + std::to_string(a + 1));
  cols.insert(cols.end(), {"intensity", "peak", "tag"});
  CsvWriter csv(cfg, cols);
  std::size_t next = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> cells;
    for (double k : grid[i]) cells.push_back(num(k));
    const bool is_peak = next < peaks.size() && peaks[next] == i;
    next += is_peak;
    cells.insert(cells.end(), {num(spec.intensity[i]), is_peak ? "1" : "0", "sampled"});
    csv.row(cells);
  }
  emit(cfg, csv.str());
  return 0;
}

int cmd_address(const RunConfig& cfg) {
  auto src = source_from_descriptor(cfg.set, cfg.params);
  auto set = src.materialize(cube_for(src, cfg.window.value_or(500.0)));
  auto map = build_address_map(set);
  auto fit = linear_fit(set, map);
  auto meyer = meyer_residual(fit);
  auto lip = lipschitz_constant(set, map, cfg.seed);
  if (!wants_json(cfg, true)) {
    CsvWriter csv(cfg, {"inner", "outer", "count", "max_residual", "tag"});
    for (const auto& a : fit.annuli)
      csv.row({num(a.inner), num(a.outer), std::to_string(a.count), num(a.max_residual), "exact"});
    emit(cfg, csv.str());
    return 0;
  }
  Json L = Json::array();
  for (int i = 0; i < fit.L.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < fit.L.cols(); ++j) row.push_back(fit.L(i, j));
    L.push_back(row);
  }
  Json annuli = Json::array();
  for (const auto& a : fit.annuli)
    annuli.push_back({{"inner", a.inner}, {"outer", a.outer}, {"count", a.count}, {"max_residual", a.max_residual}});
  Json j = {{"source", src.descriptor()},
            {"points", set.size()},
            {"rank", map.rank()},
            {"rank_of_points", map.rank_of_points()},
            {"basis", map.basis()},
            {"L", L},
            {"pi_L_error", fit.pi_L_error},
            {"lipschitz", {{"value", lip.value}, {"pairs", lip.pairs}, {"exhaustive", lip.exhaustive}, {"tag", lip.exhaustive ? "exact" : "sampled"}}},
            {"annuli", annuli},
            {"residuals_identically_zero", fit.identically_zero},
            {"meyer", {{"bounded", meyer.bounded}, {"late_variation", meyer.late_variation}}},
            {"warnings", map.warnings()}};
  j["index"] = map.index() ? Json(map.index()->str()) : Json(nullptr);
  j["exponent"] = fit.exponent ? Json(*fit.exponent) : Json(nullptr);
  j["exponent_stderr"] = fit.exponent_stderr ? Json(*fit.exponent_stderr) : Json(nullptr);
  if (fit.identically_zero) j["note"] = "residuals identically zero";
  emit_json(cfg, j);
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.construction = cfg.construction;
  auto results = verify_suite(opt);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  if (wants_json(cfg, false)) {
    Json arr = Json::array();
    for (const auto& r : results)
      arr.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"data", r.data}});
    emit_json(cfg, {{"construction", opt.construction}, {"passed", all}, {"criteria", arr}});
  } else {
    CsvWriter csv(cfg, {"criterion", "name", "result", "detail", "tag"});
    for (const auto& r : results)
      csv.row({std::to_string(r.id), "\"" + r.name + "\"", r.passed ? "PASS" : "FAIL", "\"" + r.detail + "\"", "exact"});
    emit(cfg, csv.str());
  }
  return all ? 0 : exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delone_lab: Delone-set constructions and their order invariants on finite windows"};
  app.require_subcommand(1);

  std::string config_path, params_text, set_name, out, format, weight, construction = "all";
  std::vector<double> T, U;
  double window = 0.0;
  std::uint64_t seed = 0;
  int n = 0, axis = 1;

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const std::vector<Sub> subs{
      {"generate", "materialise a construction inside a cube and write it as JSON", cmd_generate},
      {"atlas", "patch-count profile N_X(T) with window growth", cmd_atlas},
      {"repetitivity", "M_X(T) brackets, counting bound and T/3 for plotting", cmd_repetitivity},
      {"frequencies", "patch frequencies in growing cubes", cmd_frequencies},
      {"wdist", "sampled densities of a weight distribution", cmd_wdist},
      {"diffraction", "finite-T diffraction estimate along the first axis", cmd_diffraction},
      {"address", "address map, linear fit, Lipschitz ratio and Meyer residuals", cmd_address},
      {"verify", "run the acceptance criteria for a construction (all, fibonacci, zn, ...)", cmd_verify},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON run configuration; flags override it");
    sub->add_option("--set", set_name, "construction: zn, fibonacci, beatty, cut-project, product, deleted-lines, two-color");
    sub->add_option("--params", params_text, "construction parameters as a JSON object");
    sub->add_option("--n", n, "dimension shortcut for --set zn / two-color");
    sub->add_option("--T", T, "comma-separated patch radii")->delimiter(',');
    sub->add_option("--U", U, "comma-separated box widths or cube half-sides")->delimiter(',');
    sub->add_option("--window", window, "half-side of the analysis cube");
    sub->add_option("--seed", seed, "seed for sampled quantities");
    sub->add_option("--out", out, "output file (stdout when absent)");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--weight", weight, "wdist weight: volume, point-count, white-count, path-displacement");
    sub->add_option("--axis", axis, "path-displacement axis (1-based)");
    if (std::string(s.name) == "verify") sub->add_option("construction", construction, "construction to verify");
    apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      auto* sub = apps[i];
      if (!sub->parsed()) continue;
      RunConfig cfg;
      cfg.command = subs[i].name;
      if (!config_path.empty()) apply_config_json(read_json_file(config_path), cfg);
      cfg.command = subs[i].name;
      auto given = [&](const char* opt) { return sub->get_option(opt)->count() > 0; };
      if (given("--set")) cfg.set = set_name;
      if (given("--params")) {
        Json p = parse_json(params_text, "--params");
        require(p.is_object(), ErrorKind::schema, "--params must be a JSON object");
        cfg.params = p;
      }
      if (given("--n")) cfg.params["n"] = n;
      if (given("--T")) cfg.T = T;
      if (given("--U")) cfg.U = U;
      if (given("--window")) cfg.window = window;
      if (given("--seed")) cfg.seed = seed;
      if (given("--out")) cfg.out = out;
      if (given("--format")) cfg.format = format;
      if (given("--weight")) cfg.weight = weight;
      if (given("--axis")) cfg.axis = axis;
      if (cfg.command == "verify" && given("construction")) cfg.construction = construction;
      validate_config(cfg);
      return subs[i].run(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "delone_lab: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "delone_lab: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
