#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "delone/error.hpp"
#include "delone/parallel.hpp"
#include "delone/point_set.hpp"
#include "delone/region.hpp"

namespace delone {

struct Atom {
  std::vector<std::int64_t> difference;  // exact address difference
  Vec position;                          // its projection
  std::int64_t pairs;                    // number of (x1, x2) with x1 - x2 = difference
  double weight;                         // pairs / (kappa_n T^n)
};

/// Finite-window autocorrelation: one atom per address difference of pairs
/// of points with |x - center| < T (strict), sorted by address.
struct Autocorrelation {
  double T = 0.0;
  Vec center;
  int dimension = 1;
  int rank = 1;
  double normalization = 1.0;  // kappa_n T^n
  std::size_t points = 0;      // |X ∩ B(center; T)|
  std::vector<Atom> atoms;

  const Atom* find(const std::vector<std::int64_t>& difference) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), difference,
                               [](const Atom& a, const std::vector<std::int64_t>& d) { return a.difference < d; });
    return it != atoms.end() && it->difference == difference ? &*it : nullptr;
  }
};

/// `max_difference` drops atoms with |position| above it (no cutoff when unset).
inline Autocorrelation autocorrelation(const ExactPointSet& set, double T, std::optional<Vec> center = std::nullopt,
                                       std::optional<double> max_difference = std::nullopt) {
  require(T > 0.0, ErrorKind::invalid_argument, "autocorrelation radius must be positive");
  const int n = set.dimension(), s = set.rank();
  Autocorrelation ac;
  ac.T = T;
  ac.center = center.value_or(Vec(n, 0.0));
  require(static_cast<int>(ac.center.size()) == n, ErrorKind::invalid_argument, "center dimension mismatch");
  ac.dimension = n;
  ac.rank = s;
  ac.normalization = unit_ball_volume(n) * std::pow(T, n);
  require(set.region().encloses(Region::ball(ac.center, T)), ErrorKind::window_too_small,
          "the ball B(center; T) must lie inside the window");

  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto p = set.point(i);
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) d2 += (p[a] - ac.center[a]) * (p[a] - ac.center[a]);
    if (d2 < T * T) inside.push_back(i);
  }
  ac.points = inside.size();

  using Counts = std::map<std::vector<std::int64_t>, std::int64_t>;
  const double cut2 = max_difference ? *max_difference * *max_difference : -1.0;
  const std::size_t tiles = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), inside.size()));
  std::vector<Counts> partial(tiles);
  parallel_for(0, tiles, [&](std::size_t t) {
    std::vector<std::int64_t> d(s);
    for (std::size_t u = t; u < inside.size(); u += tiles) {
      auto a = set.address(inside[u]);
      for (std::size_t j : inside) {
        auto b = set.address(j);
        for (int k = 0; k < s; ++k) d[k] = a[k] - b[k];
        if (cut2 >= 0.0 && set.projected_norm2(d) > cut2) continue;
        ++partial[t][d];
      }
    }
  }, 1);
  Counts total;
  for (auto& part : partial)
    for (auto& [d, c] : part) total[d] += c;
  ac.atoms.reserve(total.size());
  for (auto& [d, c] : total) ac.atoms.push_back({d, set.project(d), c, static_cast<double>(c) / ac.normalization});
  return ac;
}

/// Largest imaginary part tolerated before it is discarded.
inline constexpr double imaginary_tolerance = 1e-9;

/// Finite-T estimate of the diffraction intensity at wave vectors k:
/// sum over atoms of weight * cos(2 pi k.v). Not the limiting measure.
struct SpectrumEstimate {
  double T = 0.0;
  std::vector<Vec> grid;
  std::vector<double> intensity;
  double max_imaginary = 0.0;
  std::optional<double> pitch;  // set when the grid is a uniform line
};

inline std::vector<Vec> line_grid(double from, double to, double pitch) {
  require(pitch > 0.0 && to >= from, ErrorKind::invalid_argument, "line grid needs from <= to and pitch > 0");
  std::vector<Vec> g;
  const auto steps = static_cast<std::int64_t>(std::floor((to - from) / pitch + 1e-9));
  for (std::int64_t i = 0; i <= steps; ++i) g.push_back({from + static_cast<double>(i) * pitch});
  return g;
}

inline SpectrumEstimate diffraction_estimate(const Autocorrelation& ac, const std::vector<Vec>& grid) {
  SpectrumEstimate out;
  out.T = ac.T;
  out.grid = grid;
  out.intensity.assign(grid.size(), 0.0);
  std::vector<double> imag(grid.size(), 0.0);
  parallel_for(0, grid.size(), [&](std::size_t g) {
    const Vec& k = grid[g];
    require(static_cast<int>(k.size()) == ac.dimension, ErrorKind::invalid_argument, "wave vector dimension mismatch");
    double re = 0.0, im = 0.0;
    for (const auto& atom : ac.atoms) {
      double phase = 0.0;
      for (int a = 0; a < ac.dimension; ++a) phase += k[a] * atom.position[a];
      phase *= 2.0 * std::numbers::pi;
      re += atom.weight * std::cos(phase);
      im += atom.weight * std::sin(phase);
    }
    out.intensity[g] = re;
    imag[g] = std::abs(im);
  }, 8);
  for (double v : imag) out.max_imaginary = std::max(out.max_imaginary, v);
  require(out.max_imaginary < imaginary_tolerance, ErrorKind::degenerate_geometry,
          "imaginary residue exceeds tolerance; autocorrelation is not symmetric");
  if (grid.size() >= 2 && ac.dimension == 1) {
    const double p = grid[1][0] - grid[0][0];
    bool uniform = p > 0.0;
    for (std::size_t i = 2; i < grid.size() && uniform; ++i)
      uniform = std::abs(grid[i][0] - grid[i - 1][0] - p) <= 1e-9 * std::max(1.0, std::abs(p));
    if (uniform) out.pitch = p;
  }
  return out;
}

/// Indices of local maxima along a uniform line grid with intensity at least
/// ratio * max. A plateau counts once, at its leftmost point; grid ends count
/// when their only neighbour is lower.
inline std::vector<std::size_t> detect_peaks(const SpectrumEstimate& spec, double threshold_ratio) {
  require(spec.pitch.has_value(), ErrorKind::invalid_argument, "peak detection needs a uniform line grid");
  std::vector<std::size_t> peaks;
  const auto& I = spec.intensity;
  if (I.empty()) return peaks;
  const double top = *std::max_element(I.begin(), I.end());
  const double threshold = threshold_ratio * top;
  std::size_t i = 0;
  while (i < I.size()) {
    std::size_t j = i;
    while (j + 1 < I.size() && I[j + 1] == I[i]) ++j;
    const bool left_lower = i == 0 || I[i - 1] < I[i];
    const bool right_lower = j + 1 == I.size() || I[j + 1] < I[i];
    if (left_lower && right_lower && I[i] >= threshold) peaks.push_back(i);
    i = j + 1;
  }
  return peaks;
}

}  // namespace delone
