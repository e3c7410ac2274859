#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "delone/atlas.hpp"
#include "delone/contfrac.hpp"
#include "delone/covering.hpp"
#include "delone/error.hpp"
#include "delone/generators.hpp"
#include "delone/parallel.hpp"
#include "delone/point_set.hpp"

namespace delone {

struct ClassCovering {
  std::size_t class_index;  // into the atlas classes
  CoveringBracket cover;
};

struct RepetitivityResult {
  double T = 0.0;
  double M_lower = 0.0;
  double M_upper = 0.0;
  std::size_t N_lower = 0;
  double resolution = 0.0;
  bool exact = false;  // dimension 1 and no edge effect: M_lower == M_upper
  bool flagged = false;  // the underlying atlas had boundary ties
  std::vector<ClassCovering> per_class_covering;
  Region evaluation_region = Region::cube(1, 1.0);
  AtlasResult atlas;
};

/// M_X(T) bracket from the center sets of the T-atlas classes.
///
/// Every center inside the certified region (window eroded by T) is known, so
/// a distance-to-nearest-center whose ball stays inside that region is final:
/// M_lower is the largest such interior distance and is a true lower bound.
/// M_upper is the plain covering radius over the evaluation region (window
/// eroded by 2T); near the edge a missing outside center can inflate it.
/// `evaluation` replaces the 2T-eroded window (it must lie inside it) so that
/// several T can be compared on one region.
inline RepetitivityResult repetitivity_function(const ExactPointSet& set, double T,
                                                std::optional<double> resolution = std::nullopt,
                                                std::optional<Region> evaluation = std::nullopt) {
  RepetitivityResult out;
  out.T = T;
  out.atlas = compute_atlas(set, T);
  auto eval = set.region().eroded(2.0 * T);
  require(eval.has_value(), ErrorKind::window_too_small, "window does not survive erosion by 2T");
  if (evaluation) {
    require(eval->encloses(*evaluation), ErrorKind::window_too_small,
            "evaluation region must lie inside the 2T-eroded window");
    eval = evaluation;
  }
  out.evaluation_region = *eval;
  const int n = set.dimension();
  double res = resolution.value_or(0.0);
  if (res <= 0.0) res = std::min(0.5 * min_pair_distance(set.points(), n) / 4.0, T / 100.0);
  out.resolution = res;
  out.N_lower = out.atlas.count();
  out.flagged = out.atlas.flagged();
  out.per_class_covering.resize(out.atlas.count());
  const Region& trusted = out.atlas.certified_region;
  parallel_for(0, out.atlas.count(), [&](std::size_t c) {
    std::vector<double> pts;
    for (std::size_t i : out.atlas.classes[c].centers) {
      auto p = set.point(i);
      pts.insert(pts.end(), p.begin(), p.end());
    }
    out.per_class_covering[c] = {c, covering_radius(pts, n, *eval, res, &trusted)};
  }, 1);
  for (const auto& pc : out.per_class_covering) {
    out.M_lower = std::max(out.M_lower, pc.cover.interior);
    out.M_upper = std::max(out.M_upper, pc.cover.upper);
  }
  out.exact = n == 1 && out.M_lower == out.M_upper;
  return out;
}

struct Bracket {
  double lower;
  double upper;
};

/// M'_X(T) = M_X(T) + T.
inline Bracket repetitivity_prime(const RepetitivityResult& r) { return {r.M_lower + r.T, r.M_upper + r.T}; }

/// Lower bound r (N^{1/n} - 1) on M_X(T).
inline double counting_lower_bound(double r, std::size_t N, int n) {
  return r * (std::pow(static_cast<double>(N), 1.0 / n) - 1.0);
}

struct CrystalProbe {
  bool crystal_verdict;   // M_upper < T/3: the set would be an ideal crystal
  bool count_trigger;     // N_lower < floor(T/R)
  double third_of_T;
  double floor_T_over_R;
};

inline CrystalProbe crystal_gap_probe(const RepetitivityResult& r, const DeloneConstants& dc) {
  CrystalProbe p;
  p.third_of_T = r.T / 3.0;
  p.floor_T_over_R = std::floor(r.T / dc.R_upper);
  p.crystal_verdict = r.M_upper < p.third_of_T;
  p.count_trigger = static_cast<double>(r.N_lower) < p.floor_T_over_R;
  return p;
}

/// One (T, M, N) observation feeding the growth report.
struct GrowthSample {
  double T;
  double M;  // representative value (certified lower end for point sets)
  double N;
};

enum class GrowthClass { ideal_crystal_like, empirically_linear, not_linear };

inline const char* to_string(GrowthClass g) {
  switch (g) {
    case GrowthClass::ideal_crystal_like: return "ideal-crystal-like";
    case GrowthClass::empirically_linear: return "empirically linear";
    case GrowthClass::not_linear: return "not linear";
  }
  return "?";
}

struct GrowthReport {
  std::vector<GrowthSample> samples;
  double slope_T = 0.0;        // least-squares slope of log M against log T
  double slope_N = 0.0;        // ... against (1/n) log N; NaN if N is constant
  double ratio_T_spread = 0.0;  // max(M/T) / min(M/T)
  double ratio_N_spread = 0.0;  // max(M/N^{1/n}) / min(M/N^{1/n})
  double M_spread = 0.0;        // max M / min M
  GrowthClass linear = GrowthClass::not_linear;
  bool dense = false;
  std::string caveat = "finite-data evidence only; no asymptotic claim";
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

inline double spread(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

}  // namespace detail

/// Thresholds: ideal-crystal-like when slope_T <= 0.25 and M varies by at
/// most 2x; empirically linear when slope_T <= 1.15 and M/T varies by at most
/// 4x; dense by the same rule applied to M against N^{1/n}.
inline GrowthReport classify_growth(std::vector<GrowthSample> samples, int n) {
  require(samples.size() >= 4, ErrorKind::insufficient_data, "growth classification needs >= 4 certified T values");
  std::sort(samples.begin(), samples.end(), [](auto& a, auto& b) { return a.T < b.T; });
  require(samples.back().T >= 8.0 * samples.front().T, ErrorKind::insufficient_data,
          "T values must span a factor of at least 8");
  GrowthReport rep;
  rep.samples = samples;
  std::vector<double> lt, ln, lm, rt, rn, m;
  for (const auto& s : samples) {
    require(s.M > 0.0 && s.N >= 1.0, ErrorKind::invalid_argument, "growth samples need M > 0 and N >= 1");
    lt.push_back(std::log(s.T));
    ln.push_back(std::log(s.N) / n);
    lm.push_back(std::log(s.M));
    rt.push_back(s.M / s.T);
    rn.push_back(s.M / std::pow(s.N, 1.0 / n));
    m.push_back(s.M);
  }
  rep.slope_T = detail::ls_slope(lt, lm);
  rep.slope_N = detail::ls_slope(ln, lm);
  rep.ratio_T_spread = detail::spread(rt);
  rep.ratio_N_spread = detail::spread(rn);
  rep.M_spread = detail::spread(m);
  if (rep.slope_T <= 0.25 && rep.M_spread <= 2.0)
    rep.linear = GrowthClass::ideal_crystal_like;
  else if (rep.slope_T <= 1.15 && rep.ratio_T_spread <= 4.0)
    rep.linear = GrowthClass::empirically_linear;
  rep.dense = !std::isnan(rep.slope_N) && rep.slope_N <= 1.15 && rep.ratio_N_spread <= 4.0;
  return rep;
}

/// Growth report of a point-set source: the window for each T is a cube of
/// half-side max(policy start, window_factor * T). M is the certified lower
/// end of the bracket, which is free of window-edge inflation.
inline GrowthReport growth_classification(const PointSetSource& src, const std::vector<double>& T_list,
                                          const WindowPolicy& policy = {}, double window_factor = 40.0) {
  std::vector<GrowthSample> samples;
  for (double T : T_list) {
    double w = std::max(policy.start(src), window_factor * T);
    auto set = src.materialize(Region::cube(src.dimension, w));
    auto r = repetitivity_function(set, T);
    samples.push_back({T, r.M_lower, static_cast<double>(r.N_lower)});
  }
  return classify_growth(std::move(samples), src.dimension);
}

/// Growth report of the symbolic recurrence function q_k + q_{k+1} at the
/// given word lengths.
inline GrowthReport symbolic_growth_classification(const ContinuedFraction& cf, const std::vector<std::int64_t>& lengths) {
  std::vector<GrowthSample> samples;
  for (std::int64_t l : lengths)
    samples.push_back({static_cast<double>(l), static_cast<double>(recurrence_formula(cf, l)), static_cast<double>(l + 1)});
  return classify_growth(std::move(samples), 1);
}

/// Brute-force recurrence of a finite word: for each length-l factor, the
/// largest gap between consecutive occurrences; the maximum over factors.
/// nullopt when some factor occurs only once in the available window.
inline std::optional<std::int64_t> symbolic_recurrence_oracle(const std::vector<int>& word, std::size_t l) {
  require(l >= 1, ErrorKind::invalid_argument, "factor length must be >= 1");
  if (word.size() < l) return std::nullopt;
  std::map<std::vector<int>, std::pair<std::int64_t, std::int64_t>> seen;  // factor -> (last index, max gap)
  for (std::size_t i = 0; i + l <= word.size(); ++i) {
    auto [it, fresh] = seen.try_emplace(std::vector<int>(word.begin() + i, word.begin() + i + l),
                                        static_cast<std::int64_t>(i), std::int64_t{-1});
    if (!fresh) {
      it->second.second = std::max(it->second.second, static_cast<std::int64_t>(i) - it->second.first);
      it->second.first = static_cast<std::int64_t>(i);
    }
  }
  std::int64_t best = 0;
  for (const auto& [f, st] : seen) {
    if (st.second < 0) return std::nullopt;
    best = std::max(best, st.second);
  }
  return best;
}

/// Number of distinct length-k factors of a word.
inline std::size_t factor_count(const std::vector<int>& word, std::size_t k) {
  std::set<std::vector<int>> f;
  for (std::size_t i = 0; i + k <= word.size(); ++i) f.emplace(word.begin() + i, word.begin() + i + k);
  return f.size();
}

struct ComplexityEntry {
  std::size_t k;
  std::size_t count;
  bool stabilized;
  std::size_t prefix_length;
};

/// Factor complexity of the Beatty word of alpha, counted on prefixes b_0..b_{L-1}
/// with L doubling until the count is unchanged across one doubling.
inline ComplexityEntry beatty_complexity(const ContinuedFraction& alpha, std::size_t k, std::size_t initial = 0,
                                         int max_doublings = 6) {
  std::size_t L = initial ? initial : 64 * (k + 1);
  auto word = beatty_word(alpha, 0, L);
  std::size_t prev = factor_count(word, k);
  for (int d = 0; d < max_doublings; ++d) {
    L *= 2;
    word = beatty_word(alpha, 0, L);
    std::size_t next = factor_count(word, k);
    if (next == prev) return {k, next, true, L};
    prev = next;
  }
  return {k, prev, false, L};
}

}  // namespace delone
