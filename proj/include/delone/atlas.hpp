#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "delone/error.hpp"
#include "delone/generators.hpp"
#include "delone/parallel.hpp"
#include "delone/point_set.hpp"
#include "delone/region.hpp"
#include "delone/spatial.hpp"

namespace delone {

/// Patch shape: the closed ball of radius T, or the closed axis-aligned cube
/// of side T (the cubical variant).
enum class PatchShape { ball, cube };

/// Tolerance for deciding |v|^2 <= T^2; ties within it are included and flagged.
inline constexpr double boundary_tolerance = 1e-9;
/// Padding of neighbour searches beyond the patch radius.
inline constexpr double erosion_slack = 1e-9;

struct PatchClass {
  PatchKey key;
  std::vector<std::size_t> centers;  // indices into the analysed set
};

struct BoundaryFlag {
  std::size_t center;  // index into the analysed set
  double distance;     // offending |pi(v)| (or sup-norm for cubes)
};

struct AtlasResult {
  double T = 0.0;
  PatchShape shape = PatchShape::ball;
  std::vector<PatchClass> classes;  // sorted by key
  Region certified_region = Region::cube(1, 1.0);
  std::vector<BoundaryFlag> boundary_flags;  // first near-tie per flagged center
  std::vector<std::int32_t> class_of;        // per point of the set, -1 outside the certified region
  bool approximate = false;                  // tolerance-snapped keys (float input)

  /// N_X(T) over the certified region: a lower bound for the whole set.
  std::size_t count() const { return classes.size(); }
  std::size_t center_count() const {
    std::size_t c = 0;
    for (const auto& k : classes) c += k.centers.size();
    return c;
  }
  bool flagged() const { return !boundary_flags.empty(); }

  std::optional<std::size_t> find(const PatchKey& key) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), key,
                               [](const PatchClass& c, const PatchKey& k) { return c.key < k; });
    if (it != classes.end() && it->key == key) return static_cast<std::size_t>(it - classes.begin());
    return std::nullopt;
  }
};

namespace detail {

inline bool integral_projection(const std::vector<double>& proj) {
  return std::all_of(proj.begin(), proj.end(), [](double v) { return v == std::round(v); });
}

/// Patch radius: T for balls, T/2 (per axis) for cubes.
inline double shape_radius(PatchShape shape, double T) { return shape == PatchShape::ball ? T : 0.5 * T; }

/// Euclidean search radius that covers every patch point, ties included.
inline double shape_reach(PatchShape shape, double T, int n) {
  const double h = shape_radius(shape, T);
  const double e = std::sqrt(h * h + boundary_tolerance) + erosion_slack;
  return shape == PatchShape::ball ? e : e * std::sqrt(static_cast<double>(n));
}

/// Groups centers by key. `key_of(i, flag)` builds the key of point i and may
/// report a boundary flag; it runs in parallel over chunks, the merge is serial
/// and in index order so results are deterministic.
template <class KeyFn>
AtlasResult group_patches(std::size_t point_count, const std::vector<std::size_t>& centers, KeyFn&& key_of) {
  AtlasResult out;
  out.class_of.assign(point_count, -1);
  std::unordered_map<PatchKey, std::size_t, PatchKey::Hash> index;
  std::vector<PatchKey> keys;
  std::vector<std::vector<std::size_t>> members;
  constexpr std::size_t chunk = 8192;
  std::vector<PatchKey> buffer;
  std::vector<std::optional<BoundaryFlag>> flags;
  for (std::size_t start = 0; start < centers.size(); start += chunk) {
    const std::size_t stop = std::min(centers.size(), start + chunk);
    buffer.assign(stop - start, PatchKey());
    flags.assign(stop - start, std::nullopt);
    parallel_for(start, stop, [&](std::size_t c) { buffer[c - start] = key_of(centers[c], flags[c - start]); }, 256);
    for (std::size_t c = start; c < stop; ++c) {
      auto [it, fresh] = index.try_emplace(std::move(buffer[c - start]), keys.size());
      if (fresh) {
        keys.push_back(it->first);
        members.emplace_back();
      }
      members[it->second].push_back(centers[c]);
      if (flags[c - start]) out.boundary_flags.push_back(*flags[c - start]);
    }
  }
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  for (std::size_t r = 0; r < order.size(); ++r) {
    for (std::size_t i : members[order[r]]) out.class_of[i] = static_cast<std::int32_t>(r);
    out.classes.push_back({std::move(keys[order[r]]), std::move(members[order[r]])});
  }
  return out;
}

inline AtlasResult atlas_impl(const ExactPointSet& set, double T, PatchShape shape) {
  require(T > 0.0, ErrorKind::invalid_argument, "T must be positive");
  // Erosion by exactly the patch radius: a point closer to the edge than
  // rounding error can only be affected through a flagged tie.
  auto certified = set.region().eroded(shape_radius(shape, T));
  require(certified.has_value(), ErrorKind::window_too_small,
          "window does not survive erosion by T = " + std::to_string(T));
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (certified->contains(set.point(i))) centers.push_back(i);
  require(!centers.empty(), ErrorKind::window_too_small, "no points in the T-eroded window");

  const int n = set.dimension(), s = set.rank();
  const bool exact_ties = integral_projection(set.projection());
  const double reach = shape_reach(shape, T, n);
  SpatialGrid grid(set.points(), n, std::max(reach, 1e-9));
  const double h = shape_radius(shape, T), h2 = h * h;
  const auto& proj = set.projection();

  auto key_of = [&](std::size_t i, std::optional<BoundaryFlag>& flag) {
    std::vector<std::int64_t> diffs;
    std::vector<std::int64_t> d(s);
    auto ai = set.address(i);
    grid.for_each_within(set.point(i), reach, [&](std::size_t j, double) {
      auto aj = set.address(j);
      for (int k = 0; k < s; ++k) d[k] = aj[k] - ai[k];
      // squared Euclidean norm for balls, squared sup-norm for cubes; in
      // dimension 1 both reduce to the same expression
      double m2 = 0.0;
      if (shape == PatchShape::ball) {
        m2 = set.projected_norm2(d);
      } else {
        for (int c = 0; c < n; ++c) {
          double v = 0.0;
          for (int r = 0; r < s; ++r) v += static_cast<double>(d[r]) * proj[r * n + c];
          m2 = std::max(m2, v * v);
        }
      }
      if (m2 > h2 + boundary_tolerance) return;
      if (std::abs(m2 - h2) < boundary_tolerance && !exact_ties && !flag) flag = BoundaryFlag{i, std::sqrt(m2)};
      diffs.insert(diffs.end(), d.begin(), d.end());
    });
    return PatchKey(std::move(diffs), s);
  };
  AtlasResult out = group_patches(set.size(), centers, key_of);
  out.T = T;
  out.shape = shape;
  out.certified_region = *certified;
  return out;
}

}  // namespace detail

/// T-atlas of an exact set: every point of the T-eroded window is classified
/// by its address-difference set {y - x : |pi(y - x)| <= T}. Equivalence is
/// decided on integers; only ball membership uses floating point, and ties
/// within 1e-9 are included and flagged (not flagged for integer projections,
/// where the comparison is exact).
inline AtlasResult compute_atlas(const ExactPointSet& set, double T) {
  return detail::atlas_impl(set, T, PatchShape::ball);
}

/// Cubical atlas: closed cube of side T centred at each point.
inline AtlasResult cubical_atlas(const ExactPointSet& set, double T) {
  return detail::atlas_impl(set, T, PatchShape::cube);
}

/// Atlas of an imported float set. Differences are snapped to multiples of the
/// set tolerance before comparison, which is not transitive near bin edges:
/// the result is marked approximate.
inline AtlasResult compute_atlas(const FloatPointSet& set, double T) {
  require(T > 0.0, ErrorKind::invalid_argument, "T must be positive");
  auto certified = set.region().eroded(T);
  require(certified.has_value(), ErrorKind::window_too_small, "window does not survive erosion by T");
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (certified->contains(set.point(i))) centers.push_back(i);
  require(!centers.empty(), ErrorKind::window_too_small, "no points in the T-eroded window");
  const int n = set.dimension();
  const double q = set.tolerance();
  const double reach = detail::shape_reach(PatchShape::ball, T, n);
  SpatialGrid grid(set.points(), n, reach);
  auto key_of = [&](std::size_t i, std::optional<BoundaryFlag>& flag) {
    std::vector<std::int64_t> diffs;
    auto p = set.point(i);
    grid.for_each_within(p, reach, [&](std::size_t j, double d2) {
      if (d2 > T * T + boundary_tolerance) return;
      if (std::abs(d2 - T * T) < boundary_tolerance && !flag) flag = BoundaryFlag{i, std::sqrt(d2)};
      for (int a = 0; a < n; ++a) diffs.push_back(std::llround((set.point(j)[a] - p[a]) / q));
    });
    return PatchKey(std::move(diffs), n);
  };
  AtlasResult out = detail::group_patches(set.size(), centers, key_of);
  out.T = T;
  out.certified_region = *certified;
  out.approximate = true;
  return out;
}

/// Window growth for profiles: cube of half-side `initial`, multiplied by
/// `growth` up to `max_doublings` times.
struct WindowPolicy {
  double initial = 0.0;  // <= 0 means 50 R (from the source's covering hint)
  double growth = 2.0;
  int max_doublings = 4;

  double start(const PointSetSource& src) const { return initial > 0.0 ? initial : 50.0 * src.covering_hint; }
};

struct ProfileEntry {
  double T;
  std::size_t N_lower;
  bool stabilized;
  double window;  // half-side of the last window used
};

/// N_X(T) for each T, growing the window until the count is unchanged across
/// one growth step (heuristic completeness) or the budget runs out.
inline std::vector<ProfileEntry> patch_count_profile(const PointSetSource& src, const std::vector<double>& T_list,
                                                     const WindowPolicy& policy = {},
                                                     PatchShape shape = PatchShape::ball) {
  for (std::size_t i = 0; i < T_list.size(); ++i) {
    require(T_list[i] > 0.0, ErrorKind::invalid_argument, "T values must be positive");
    require(i == 0 || T_list[i] > T_list[i - 1], ErrorKind::invalid_argument, "T values must increase");
  }
  require(policy.growth > 1.0, ErrorKind::invalid_argument, "window growth must exceed 1");
  std::vector<ProfileEntry> out;
  for (double T : T_list) {
    double w = std::max(policy.start(src), 2.0 * T + 4.0 * src.covering_hint);
    auto count_at = [&](double half) {
      auto set = src.materialize(Region::cube(src.dimension, half));
      return detail::atlas_impl(set, T, shape).count();
    };
    std::size_t prev = count_at(w);
    bool stable = false;
    for (int step = 0; step < policy.max_doublings; ++step) {
      w *= policy.growth;
      std::size_t next = count_at(w);
      if (next == prev) {
        stable = true;
        break;
      }
      prev = next;
    }
    out.push_back({T, prev, stable, w});
  }
  return out;
}

struct EntropyPoint {
  double T;
  double normalized_log_count;  // log N / T^n
};

struct EntropyProbe {
  std::vector<EntropyPoint> points;
  double c0 = 0.0;  // max of log N / T^n over the profile, so log N <= c0 T^n there
};

/// Normalised log-counts of the stabilised profile entries. No limit is claimed.
inline EntropyProbe entropy_probe(const std::vector<ProfileEntry>& profile, int n) {
  EntropyProbe out;
  for (const auto& e : profile) {
    if (!e.stabilized) continue;
    double v = std::log(static_cast<double>(e.N_lower)) / std::pow(e.T, n);
    out.points.push_back({e.T, v});
    out.c0 = std::max(out.c0, v);
  }
  return out;
}

}  // namespace delone
