#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "delone/error.hpp"

namespace delone {

/// Uniform bucket grid over a flat array of n-dimensional points
/// (row-major, n doubles per point). Supports fixed-radius and nearest queries.
/// The grid only views the coordinates; they must outlive it.
class SpatialGrid {
 public:
  static constexpr int max_dim = 8;
  using CellKey = std::array<std::int64_t, max_dim>;

  SpatialGrid(std::span<const double> points, int dim, double cell)
      : pts_(points), dim_(dim), cell_(cell) {
    require(dim >= 1 && dim <= max_dim, ErrorKind::invalid_argument, "spatial grid dimension out of range");
    require(cell > 0.0, ErrorKind::invalid_argument, "spatial grid cell must be positive");
    const std::size_t count = points.size() / dim;
    lo_.fill(std::numeric_limits<std::int64_t>::max());
    hi_.fill(std::numeric_limits<std::int64_t>::min());
    for (std::size_t i = 0; i < count; ++i) {
      CellKey k = key_of(points.subspan(i * dim, dim));
      buckets_[k].push_back(static_cast<std::uint32_t>(i));
      for (int a = 0; a < dim_; ++a) {
        lo_[a] = std::min(lo_[a], k[a]);
        hi_[a] = std::max(hi_[a], k[a]);
      }
    }
  }

  std::size_t size() const { return pts_.size() / dim_; }

  /// Calls fn(index, squared distance) for every point with |q - p| <= radius.
  template <class Fn>
  void for_each_within(std::span<const double> p, double radius, Fn&& fn) const {
    if (buckets_.empty()) return;
    CellKey c = key_of(p);
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
    CellKey from{}, to{};
    for (int a = 0; a < dim_; ++a) {
      from[a] = std::max(c[a] - reach, lo_[a]);
      to[a] = std::min(c[a] + reach, hi_[a]);
      if (from[a] > to[a]) return;
    }
    const double r2 = radius * radius;
    CellKey k = from;
    while (true) {
      auto it = buckets_.find(k);
      if (it != buckets_.end()) {
        for (std::uint32_t idx : it->second) {
          double d2 = dist2(p, idx);
          if (d2 <= r2) fn(static_cast<std::size_t>(idx), d2);
        }
      }
      int a = 0;
      for (; a < dim_; ++a) {
        if (k[a] < to[a]) {
          ++k[a];
          break;
        }
        k[a] = from[a];
      }
      if (a == dim_) break;
    }
  }

  struct Hit {
    std::size_t index;
    double distance;
  };

  /// Nearest point to p, searched out to max_radius; nullopt when none.
  std::optional<Hit> nearest(std::span<const double> p,
                             double max_radius = std::numeric_limits<double>::infinity()) const {
    if (buckets_.empty()) return std::nullopt;
    CellKey c = key_of(p);
    std::int64_t max_ring = 0;
    for (int a = 0; a < dim_; ++a)
      max_ring = std::max({max_ring, std::abs(c[a] - lo_[a]), std::abs(hi_[a] - c[a])});
    double best2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
      visit_ring(c, ring, [&](const std::vector<std::uint32_t>& bucket) {
        for (std::uint32_t idx : bucket) {
          double d2 = dist2(p, idx);
          if (d2 < best2 || (d2 == best2 && idx < best)) {
            best2 = d2;
            best = idx;
          }
        }
      });
      const double reached = static_cast<double>(ring) * cell_;
      if (best2 <= reached * reached) break;
      if (reached > max_radius) break;
    }
    if (!std::isfinite(best2) || std::sqrt(best2) > max_radius) return std::nullopt;
    return Hit{best, std::sqrt(best2)};
  }

 private:
  CellKey key_of(std::span<const double> p) const {
    CellKey k{};
    for (int a = 0; a < dim_; ++a) k[a] = static_cast<std::int64_t>(std::floor(p[a] / cell_));
    return k;
  }

  double dist2(std::span<const double> p, std::uint32_t idx) const {
    const double* q = pts_.data() + static_cast<std::size_t>(idx) * dim_;
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) d2 += (p[a] - q[a]) * (p[a] - q[a]);
    return d2;
  }

  // Buckets whose Chebyshev cell distance from c is exactly `ring`.
  template <class Fn>
  void visit_ring(const CellKey& c, std::int64_t ring, Fn&& fn) const {
    CellKey k{};
    for (int a = 0; a < dim_; ++a) k[a] = c[a] - ring;
    while (true) {
      bool on_shell = false;
      for (int a = 0; a < dim_; ++a)
        if (k[a] == c[a] - ring || k[a] == c[a] + ring) on_shell = true;
      if (on_shell || ring == 0) {
        auto it = buckets_.find(k);
        if (it != buckets_.end()) fn(it->second);
      }
      int a = 0;
      for (; a < dim_; ++a) {
        if (k[a] < c[a] + ring) {
          ++k[a];
          break;
        }
        k[a] = c[a] - ring;
      }
      if (a == dim_) break;
    }
  }

  struct KeyHash {
    std::size_t operator()(const CellKey& k) const noexcept {
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (std::int64_t v : k) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return static_cast<std::size_t>(h);
    }
  };

  std::span<const double> pts_;
  int dim_;
  double cell_;
  CellKey lo_{}, hi_{};
  std::unordered_map<CellKey, std::vector<std::uint32_t>, KeyHash> buckets_;
};

}  // namespace delone
