#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "delone/address.hpp"
#include "delone/atlas.hpp"
#include "delone/contfrac.hpp"
#include "delone/ergodic.hpp"
#include "delone/generators.hpp"
#include "delone/repetitivity.hpp"
#include "delone/spectral.hpp"

namespace delone {

/// Outcome of one acceptance criterion. `detail` is a short deterministic
/// summary; `data` carries the numbers behind the verdict.
struct CriterionResult {
  CriterionResult() = default;
  CriterionResult(int id_, std::string name_) : id(id_), name(std::move(name_)) {}

  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json data = nlohmann::json::object();
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::string construction = "all";  // all | fibonacci | zn | cut-project | two-color | deleted-lines | sturmian
};

/// Pinned tolerances of the suite.
namespace tolerance {
inline constexpr double diffraction = 1e-9;
inline constexpr double projection_identity = 1e-9;
inline constexpr double path_vs_fit = 0.02;
inline constexpr double meyer_variation = 0.2;
inline constexpr double lipschitz_doubling = 0.05;
}  // namespace tolerance

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

/// One analysed construction of the repetitivity suite.
struct SuiteEntry {
  std::string construction;
  PointSetSource source;
  std::vector<double> T;
  bool aperiodic;
  double window_factor;  // window half-side = max(50 R, factor * T)
  double window_offset = 0.0;

  double window(double T) const { return std::max(50.0 * source.covering_hint, window_factor * T + window_offset); }
};

inline std::vector<SuiteEntry> repetitivity_suite() {
  return {
      {"zn", gen_integer_lattice(1), {2.0, 4.0, 8.0, 16.0}, false, 40.0},
      {"zn", gen_integer_lattice(2), {3.0, 6.0}, false, 6.0, 4.0},
      {"fibonacci", gen_fibonacci(), {2.0, 4.0, 8.0, 16.0}, true, 40.0},
      {"cut-project", gen_cut_project_1d(ContinuedFraction::periodic({2})), {2.0, 4.0, 8.0}, true, 40.0},
      {"two-color", gen_two_color({1, {16, 32, 64}}), {1.5, 3.0, 6.0}, true, 40.0},
  };
}

inline bool selected(const VerifyOptions& opt, const std::string& construction) {
  return opt.construction == "all" || opt.construction == construction;
}

struct SuiteRun {
  const SuiteEntry* entry;
  RepetitivityResult result;
  DeloneConstants constants;
};

inline std::vector<SuiteRun> run_suite(const std::vector<SuiteEntry>& suite, const VerifyOptions& opt) {
  std::vector<SuiteRun> runs;
  for (const auto& e : suite) {
    if (!selected(opt, e.construction)) continue;
    for (double T : e.T) {
      auto set = e.source.materialize(Region::cube(e.source.dimension, e.window(T)));
      runs.push_back({&e, repetitivity_function(set, T), delone_constants(set)});
    }
  }
  return runs;
}

inline std::string label(const SuiteRun& r) {
  return r.entry->source.name + "/n" + std::to_string(r.entry->source.dimension) + "@T=" + fmt(r.result.T);
}

inline std::vector<ContinuedFraction> recurrence_fractions() {
  return {ContinuedFraction::golden(), ContinuedFraction::periodic({2}), ContinuedFraction::periodic({1, 2}),
          ContinuedFraction::periodic({1, 3, 5, 2, 4}), ContinuedFraction::periodic({5})};
}

}  // namespace detail

/// q_k + q_{k+1} against the longest gap between consecutive occurrences of
/// every length-l factor of a Beatty prefix of at least 50 l symbols.
inline CriterionResult verify_recurrence_formula(const VerifyOptions& opt) {
  CriterionResult out{1, "recurrence formula vs word-scan oracle"};
  std::size_t checked = 0, mismatches = 0, missing = 0;
  for (const auto& cf : detail::recurrence_fractions()) {
    if (opt.construction == "fibonacci" && cf.label() != ContinuedFraction::golden().label()) continue;
    auto word = beatty_word(cf, 0, 50 * 60);
    for (std::size_t l = 1; l <= 60; ++l) {
      std::size_t len = 50 * l;
      std::optional<std::int64_t> got;
      for (int grow = 0; grow < 4 && !got; ++grow, len *= 2) {
        if (word.size() < len) word = beatty_word(cf, 0, len);
        got = symbolic_recurrence_oracle(std::vector<int>(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(len)), l);
      }
      ++checked;
      if (!got) ++missing;
      else if (BigInt(*got) != recurrence_formula(cf, static_cast<std::int64_t>(l))) {
        ++mismatches;
        out.data["mismatches"].push_back({{"alpha", cf.label()}, {"l", l}});
      }
    }
  }
  out.passed = checked > 0 && mismatches == 0 && missing == 0;
  out.detail = std::to_string(checked) + " (alpha, l) pairs, " + std::to_string(mismatches) + " mismatches, " +
               std::to_string(missing) + " unresolved";
  out.data["checked"] = checked;
  return out;
}

inline CriterionResult verify_sturmian_complexity(const VerifyOptions& opt) {
  CriterionResult out{2, "Sturmian complexity k + 1"};
  std::vector<ContinuedFraction> alphas{ContinuedFraction::golden(), ContinuedFraction::periodic({2}),
                                        ContinuedFraction::periodic({1, 2})};
  if (opt.construction == "fibonacci") alphas.erase(alphas.begin() + 1, alphas.end());
  std::size_t bad = 0, checked = 0;
  for (const auto& cf : alphas)
    for (std::size_t k = 1; k <= 30; ++k) {
      auto e = beatty_complexity(cf, k);
      ++checked;
      if (!e.stabilized || e.count != k + 1) {
        ++bad;
        out.data["failures"].push_back({{"alpha", cf.label()}, {"k", k}, {"count", e.count}});
      }
    }
  out.passed = bad == 0;
  out.detail = std::to_string(checked) + " counts, " + std::to_string(bad) + " off k + 1";
  return out;
}

/// Criteria 3, 4 and 5 share one pass over the repetitivity suite.
inline std::vector<CriterionResult> verify_repetitivity_suite(const VerifyOptions& opt) {
  auto suite = detail::repetitivity_suite();
  auto runs = detail::run_suite(suite, opt);
  CriterionResult bound{3, "M_upper >= r (N^{1/n} - 1)"};
  CriterionResult probe{4, "crystal-gap probe"};
  CriterionResult prime{5, "M' = M + T"};
  std::size_t violations = 0, misclassified = 0, prime_bad = 0;
  std::map<const detail::SuiteEntry*, std::vector<const detail::SuiteRun*>> by_entry;
  for (const auto& run : runs) {
    const auto& r = run.result;
    const int n = run.entry->source.dimension;
    const double lb = counting_lower_bound(run.constants.r, r.N_lower, n);
    const bool ok = r.M_upper >= lb;
    violations += !ok;
    bound.data["rows"].push_back({{"case", detail::label(run)}, {"M_upper", r.M_upper}, {"bound", lb}, {"ok", ok}});

    auto p = crystal_gap_probe(r, run.constants);
    // aperiodic sets must never look like crystals; Z^n must
    const bool right = run.entry->aperiodic ? !p.crystal_verdict : p.crystal_verdict;
    misclassified += !right;
    probe.data["rows"].push_back({{"case", detail::label(run)},
                                  {"M_lower", r.M_lower},
                                  {"M_upper", r.M_upper},
                                  {"T_over_3", p.third_of_T},
                                  {"crystal_verdict", p.crystal_verdict}});
    by_entry[run.entry].push_back(&run);

    auto mp = repetitivity_prime(r);
    prime_bad += !(mp.lower == r.M_lower + r.T && mp.upper == r.M_upper + r.T);
  }
  // lattices: the M bracket holds one constant (the covering radius) at every T
  for (const auto& [entry, list] : by_entry) {
    if (entry->aperiodic) continue;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (const auto* run : list) {
      lo = std::max(lo, run->result.M_lower);
      hi = std::min(hi, run->result.M_upper);
    }
    const bool constant = lo <= hi;
    misclassified += !constant;
    probe.data["lattice_constant"].push_back(
        {{"source", entry->source.name + "/n" + std::to_string(entry->source.dimension)}, {"lower", lo}, {"upper", hi}});
  }
  bound.passed = !runs.empty() && violations == 0;
  bound.detail = std::to_string(runs.size()) + " (generator, T) pairs, " + std::to_string(violations) + " violations";
  probe.passed = !runs.empty() && misclassified == 0;
  probe.detail = std::to_string(runs.size()) + " cases, " + std::to_string(misclassified) + " misclassifications";
  prime.passed = !runs.empty() && prime_bad == 0;
  prime.detail = std::to_string(runs.size()) + " results, " + std::to_string(prime_bad) + " mismatches";
  return {bound, probe, prime};
}

/// Deleted-lines construction at level 1: patch counts against 12 T^2 and the
/// removed points against the three congruence systems, point by point.
inline CriterionResult verify_deleted_lines(const VerifyOptions&) {
  CriterionResult out{6, "deleted-lines count bound and congruences"};
  bool ok = true;
  std::size_t compared = 0, wrong = 0;
  for (std::int64_t a1 : {2, 4}) {
    auto set = gen_deleted_lines({a1}).materialize(Region::cube(3, 24.0));
    const std::int64_t m = 4 * a1;
    auto mod = [m](std::int64_t v) { return ((v % m) + m) % m; };
    for (std::int64_t x = -24; x <= 24; ++x)
      for (std::int64_t y = -24; y <= 24; ++y)
        for (std::int64_t z = -24; z <= 24; ++z) {
          const bool sx = mod(y) == mod(a1) && mod(z) == mod(-a1);
          const bool sy = mod(z) == mod(a1) && mod(x) == mod(-a1);
          const bool sz = mod(x) == mod(a1) && mod(y) == mod(-a1);
          const bool present = set.find(std::vector<std::int64_t>{x, y, z}).has_value();
          ++compared;
          wrong += present == (sx || sy || sz);
        }
    for (std::int64_t T = 1; T <= a1; ++T) {
      const auto N = compute_atlas(set, static_cast<double>(T)).count();
      const bool within = N <= static_cast<std::size_t>(12 * T * T);
      ok = ok && within;
      out.data["counts"].push_back({{"a1", a1}, {"T", T}, {"N", N}, {"bound", 12 * T * T}});
    }
  }
  out.passed = ok && wrong == 0;
  out.detail = std::to_string(compared) + " lattice points compared, " + std::to_string(wrong) +
               " congruence mismatches, counts " + (ok ? "within" : "above") + " 12 T^2";
  return out;
}

/// White proportions at s_1..s_4 for n = 1, N = 8, a = (16, 32, 64, 128),
/// counted cell by cell and compared with rho_k as exact rationals.
inline CriterionResult verify_two_color(const VerifyOptions&) {
  CriterionResult out{7, "two-color proportions equal rho_k"};
  const TwoColorParams params{1, {16, 32, 64, 128}};
  auto rho = rho_sequence(params, 4);
  bool ok = params.N() == 8;
  for (std::size_t k = 1; k <= 4; ++k) {
    const std::int64_t s = params.scale(k);
    const std::int64_t white = two_color_white_count(params, s);
    const Rational counted(white, 2 * s);
    const Rational half(1, 2);
    Rational dev = rho.recursion[k] - half;
    if (dev < 0) dev = -dev;
    const bool row_ok = counted == rho.recursion[k] && counted == rho.closed_form[k] &&
                        dev >= half * rho.product[k] && rho.product[k] > 0;
    // consecutive proportions sit on opposite sides of 1/2
    const bool alternates = k == 1 || (rho.recursion[k] - half) * (rho.recursion[k - 1] - half) < 0;
    ok = ok && row_ok && alternates;
    out.data["rows"].push_back({{"k", k},
                                {"s", s},
                                {"white", white},
                                {"rho", rho.recursion[k].str()},
                                {"floor", Rational(half * rho.product[k]).str()},
                                {"ok", row_ok && alternates}});
  }
  out.passed = ok;
  out.detail = std::string("rho_1..rho_4 ") + (ok ? "matched exactly, alternating about 1/2" : "mismatch");
  return out;
}

inline CriterionResult verify_weight_engine(const VerifyOptions& opt) {
  CriterionResult out{8, "weight engine brackets"};
  DensityOptions dopt;
  dopt.seed = opt.seed;
  const std::vector<double> U{2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
  auto vol = density_profile(weight_volume(1), Region::box({-500.0}, {500.0}), U, dopt);
  auto z = gen_integer_lattice(1).materialize(Region::box({-500.0}, {500.0}));
  auto cnt = density_profile(weight_point_count(z), z.region(), U, dopt);
  bool ok = true;
  for (std::size_t i = 0; i < U.size(); ++i) {
    const bool v = vol.rows[i].delta[0] == 0.0;
    const bool c = cnt.rows[i].delta[0] <= 2.0 / U[i];
    ok = ok && v && c;
    out.data["rows"].push_back({{"U", U[i]}, {"volume_delta", vol.rows[i].delta[0]}, {"count_delta", cnt.rows[i].delta[0]}});
  }
  out.passed = ok;
  out.detail = std::to_string(U.size()) + " scales: volume delta " + (ok ? "0, count delta <= 2/U" : "bracket violated");
  return out;
}

inline CriterionResult verify_autocorrelation(const VerifyOptions&) {
  CriterionResult out{9, "autocorrelation and diffraction of Z"};
  auto z = gen_integer_lattice(1).materialize(Region::box({-30.0}, {30.0}));
  auto ac = autocorrelation(z, 10.0);
  bool weights = ac.atoms.size() == 37;  // differences -18..18 of the 19 points
  for (const auto& atom : ac.atoms) {
    const auto m = std::abs(atom.difference[0]);
    weights = weights && atom.weight == static_cast<double>(19 - m) / 20.0;
  }
  auto spec = diffraction_estimate(ac, {{0.0}, {1.0}, {0.5}});
  const bool diffr = std::abs(spec.intensity[0] - 18.05) <= tolerance::diffraction &&
                     std::abs(spec.intensity[1] - 18.05) <= tolerance::diffraction &&
                     std::abs(spec.intensity[2] - 0.05) <= tolerance::diffraction;
  const double pitch = 0.01;
  auto line = diffraction_estimate(ac, line_grid(0.0, 3.0, pitch));
  auto peaks = detect_peaks(line, 0.5);
  bool located = peaks.size() == 4;
  for (std::size_t j = 0; located && j < peaks.size(); ++j)
    located = std::abs(line.grid[peaks[j]][0] - static_cast<double>(j)) <= pitch;
  out.passed = weights && diffr && located;
  out.detail = std::string("weights ") + (weights ? "exact" : "wrong") + ", I(0)=" + detail::fmt(spec.intensity[0]) +
               " I(1)=" + detail::fmt(spec.intensity[1]) + " I(0.5)=" + detail::fmt(spec.intensity[2]) + ", " +
               std::to_string(peaks.size()) + " peaks";
  return out;
}

inline CriterionResult verify_address(const VerifyOptions& opt) {
  CriterionResult out{10, "address map cross-validation"};
  auto chain = [](double half) { return gen_fibonacci().materialize(Region::box({-half}, {half})); };
  auto fib = chain(6950.0);
  auto map = build_address_map(fib);
  auto fit = linear_fit(fib, map);
  auto w = path_displacement_distribution(fib, map, 1);
  DensityOptions dopt;
  dopt.seed = opt.seed;
  auto prof = density_profile(w, *fib.region().eroded(5.0), {100.0, 400.0, 1600.0}, dopt);
  double worst = 0.0;
  for (int k = 0; k < map.rank(); ++k)
    worst = std::max(worst, std::abs(prof.rows.back().f_zero[k] / fit.L(k, 0) - 1.0));
  auto meyer = meyer_residual(fit);
  auto half = chain(3475.0);
  auto lip_small = lipschitz_constant(half, build_address_map(half), opt.seed);
  auto lip_big = lipschitz_constant(fib, map, opt.seed);
  const double lip_change = std::abs(lip_big.value / lip_small.value - 1.0);
  const bool ok = fib.size() >= 10000 && worst <= tolerance::path_vs_fit &&
                  fit.pi_L_error <= tolerance::projection_identity && meyer.enough_annuli &&
                  meyer.late_variation < tolerance::meyer_variation && lip_change <= tolerance::lipschitz_doubling;
  out.passed = ok;
  out.detail = "points=" + std::to_string(fib.size()) + " path/fit=" + detail::fmt(worst) +
               " |piL-I|=" + detail::fmt(fit.pi_L_error) + " meyer=" + detail::fmt(meyer.late_variation) +
               " lipschitz change=" + detail::fmt(lip_change);
  out.data = {{"L", {fit.L(0, 0), fit.L(1, 0)}},
              {"path", prof.rows.back().f_zero},
              {"exponent", fit.exponent.value_or(0.0)},
              {"annuli", meyer.sup_residual},
              {"lipschitz", {lip_small.value, lip_big.value}}};
  return out;
}

/// n = 1: the cube(T) atlas and the ball(T/2) atlas coincide key for key.
inline CriterionResult verify_cubical_identity(const VerifyOptions& opt) {
  CriterionResult out{11, "cubical count equals ball count at T/2"};
  std::size_t checked = 0, wrong = 0;
  for (const auto& e : detail::repetitivity_suite()) {
    if (e.source.dimension != 1 || !detail::selected(opt, e.construction)) continue;
    for (double T : e.T) {
      auto set = e.source.materialize(Region::cube(1, e.window(T)));
      auto cube = cubical_atlas(set, T), ball = compute_atlas(set, T / 2.0);
      bool same = cube.count() == ball.count() && cube.center_count() == ball.center_count();
      for (std::size_t c = 0; same && c < cube.count(); ++c)
        same = cube.classes[c].key == ball.classes[c].key && cube.classes[c].centers == ball.classes[c].centers;
      ++checked;
      wrong += !same;
      out.data["rows"].push_back({{"source", e.source.name}, {"T", T}, {"cube", cube.count()}, {"ball", ball.count()}});
    }
  }
  out.passed = checked > 0 && wrong == 0;
  out.detail = std::to_string(checked) + " (generator, T) pairs, " + std::to_string(wrong) + " differ";
  return out;
}

inline const std::vector<std::string>& verify_constructions() {
  static const std::vector<std::string> names{"all",       "fibonacci",     "zn",      "cut-project",
                                              "two-color", "deleted-lines", "sturmian"};
  return names;
}

/// Runs the criteria relevant to a construction, in criterion order.
inline std::vector<CriterionResult> verify_suite(const VerifyOptions& opt) {
  const auto& names = verify_constructions();
  require(std::find(names.begin(), names.end(), opt.construction) != names.end(), ErrorKind::invalid_argument,
          "unknown construction '" + opt.construction + "'");
  const std::string& c = opt.construction;
  const bool all = c == "all";
  std::vector<CriterionResult> out;
  if (all || c == "fibonacci" || c == "sturmian") {
    out.push_back(verify_recurrence_formula(opt));
    out.push_back(verify_sturmian_complexity(opt));
  }
  if (all || c == "fibonacci" || c == "zn" || c == "cut-project" || c == "two-color")
    for (auto& r : verify_repetitivity_suite(opt)) out.push_back(std::move(r));
  if (all || c == "deleted-lines") out.push_back(verify_deleted_lines(opt));
  if (all || c == "two-color") out.push_back(verify_two_color(opt));
  if (all || c == "zn") {
    out.push_back(verify_weight_engine(opt));
    out.push_back(verify_autocorrelation(opt));
  }
  if (all || c == "fibonacci") out.push_back(verify_address(opt));
  if (all || c == "fibonacci" || c == "zn" || c == "cut-project" || c == "two-color")
    out.push_back(verify_cubical_identity(opt));
  return out;
}

}  // namespace delone
