#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "delone/region.hpp"
#include "delone/spatial.hpp"

namespace delone {

/// Certified bracket on sup_{t in region} dist(t, centers).
struct CoveringBracket {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;  // lower == upper by construction (n = 1)
  // Largest distance-to-nearest-center seen at a point x whose ball of that
  // radius lies inside the trusted region; there the distance is final even
  // if more centers exist outside the window. Equals `lower` without one.
  double interior = 0.0;

  bool covered() const { return std::isfinite(upper); }
};

namespace detail {

inline CoveringBracket covering_radius_1d(std::span<const double> centers, const Region& region,
                                          const Region* trusted) {
  std::vector<double> c(centers.begin(), centers.end());
  std::sort(c.begin(), c.end());
  const Region bb = region.bounding_box();
  const double a = bb.lo()[0], b = bb.hi()[0];
  auto dist = [&](double t) {
    auto it = std::lower_bound(c.begin(), c.end(), t);
    double d = std::numeric_limits<double>::infinity();
    if (it != c.end()) d = *it - t;
    if (it != c.begin()) d = std::min(d, t - *std::prev(it));
    return d;
  };
  double best = 0.0, interior = 0.0;
  auto offer = [&](double t, double d) {
    best = std::max(best, d);
    if (!trusted || trusted->depth(std::span<const double>(&t, 1)) >= d) interior = std::max(interior, d);
  };
  offer(a, dist(a));
  offer(b, dist(b));
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    double mid = 0.5 * (c[i] + c[i + 1]);
    if (mid > a && mid < b) offer(mid, 0.5 * (c[i + 1] - c[i]));
  }
  return {best, best, true, interior};
}

}  // namespace detail

/// Covering radius of `centers` (flat, dim doubles each) relative to `region`.
///
/// n = 1 is exact: the distance function is maximised at the region ends or
/// at midpoints of consecutive centers. For n >= 2 a branch-and-bound over
/// cells refines only where the Lipschitz bound f(q) + |cell| could beat the
/// best sample; it stops at cell pitch `resolution`, so
/// upper = lower + resolution * sqrt(n) / 2 is a valid bound (twice that for
/// ball regions, whose cells are clipped).
inline CoveringBracket covering_radius(std::span<const double> centers, int dim, const Region& region,
                                       double resolution, const Region* trusted = nullptr) {
  require(region.dimension() == dim, ErrorKind::invalid_argument, "covering radius: dimension mismatch");
  require(resolution > 0.0, ErrorKind::invalid_argument, "covering radius: resolution must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (centers.empty()) return {inf, inf, false, inf};
  if (dim == 1) return detail::covering_radius_1d(centers, region, trusted);

  const std::size_t count = centers.size() / dim;
  const Region bb = region.bounding_box();
  const double vol = bb.volume();
  double pitch = std::max(resolution, std::pow(vol / static_cast<double>(count), 1.0 / dim));
  SpatialGrid grid(centers, dim, pitch);

  struct Cell {
    Vec lo;
    double side_scale;  // side lengths = base_side * side_scale
    double bound;
  };
  std::vector<int> parts(dim);
  Vec base_side(dim);
  for (int a = 0; a < dim; ++a) {
    double len = bb.hi()[a] - bb.lo()[a];
    parts[a] = std::max(1, static_cast<int>(std::ceil(len / pitch)));
    base_side[a] = len / parts[a];
  }
  const bool clipped = !region.is_box();
  double lower = 0.0, interior = 0.0;

  auto evaluate = [&](const Vec& lo, double scale, Cell& out) {
    Vec mid(dim);
    double half_diag2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      double s = base_side[a] * scale;
      mid[a] = lo[a] + 0.5 * s;
      half_diag2 += 0.25 * s * s;
    }
    Vec q = region.clamp(mid);
    if (clipped) {
      // a clipped cell might not meet the region at all
      double off2 = 0.0;
      for (int a = 0; a < dim; ++a) off2 += (q[a] - mid[a]) * (q[a] - mid[a]);
      if (off2 > half_diag2 * (1.0 + 1e-12)) return false;
    }
    auto hit = grid.nearest(q);
    double f = hit ? hit->distance : inf;
    lower = std::max(lower, f);
    if (f > interior && (!trusted || trusted->depth(q) >= f)) interior = f;
    double slack = clipped ? 2.0 * std::sqrt(half_diag2) : std::sqrt(half_diag2);
    out = Cell{lo, scale, f + slack};
    return true;
  };

  auto cmp = [](const Cell& x, const Cell& y) { return x.bound < y.bound; };
  std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> queue(cmp);

  std::vector<int> idx(dim, 0);
  while (true) {
    Vec lo(dim);
    for (int a = 0; a < dim; ++a) lo[a] = bb.lo()[a] + idx[a] * base_side[a];
    Cell cell;
    if (evaluate(lo, 1.0, cell)) queue.push(std::move(cell));
    int a = 0;
    for (; a < dim; ++a) {
      if (++idx[a] < parts[a]) break;
      idx[a] = 0;
    }
    if (a == dim) break;
  }

  while (!queue.empty()) {
    Cell top = queue.top();
    queue.pop();
    if (top.bound <= lower) break;
    double max_side = 0.0;
    for (int a = 0; a < dim; ++a) max_side = std::max(max_side, base_side[a] * top.side_scale);
    if (max_side <= resolution) break;  // highest remaining bound sits on a leaf cell
    const double child = 0.5 * top.side_scale;
    for (unsigned mask = 0; mask < (1u << dim); ++mask) {
      Vec lo(top.lo);
      for (int a = 0; a < dim; ++a)
        if (mask & (1u << a)) lo[a] += base_side[a] * child;
      Cell c;
      if (evaluate(lo, child, c) && c.bound > lower) queue.push(std::move(c));
    }
  }
  const double width = resolution * std::sqrt(static_cast<double>(dim)) * (clipped ? 1.0 : 0.5);
  return {lower, lower + width, false, interior};
}

}  // namespace delone
