#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delone/covering.hpp"
#include "delone/error.hpp"
#include "delone/region.hpp"
#include "delone/spatial.hpp"

namespace delone {

using IVec = std::vector<std::int64_t>;

namespace detail {

inline bool lex_less(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// Sorts fixed-width integer rows lexicographically in place.
inline void sort_rows(std::vector<std::int64_t>& flat, int width) {
  const std::size_t rows = flat.size() / width;
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return lex_less({flat.data() + x * width, static_cast<std::size_t>(width)},
                    {flat.data() + y * width, static_cast<std::size_t>(width)});
  });
  std::vector<std::int64_t> out;
  out.reserve(flat.size());
  for (std::size_t r : order) out.insert(out.end(), flat.begin() + r * width, flat.begin() + (r + 1) * width);
  flat = std::move(out);
}

inline bool rows_equal(const std::int64_t* a, const std::int64_t* b, int width) {
  return std::equal(a, a + width, b);
}

}  // namespace detail

/// Canonical representative of a translation class of patches: the sorted
/// address differences (patch point minus center), zero vector included.
class PatchKey {
 public:
  PatchKey() = default;

  /// `diffs` holds rank-wide rows in any order.
  PatchKey(std::vector<std::int64_t> diffs, int rank) : rank_(rank), data_(std::move(diffs)) {
    require(rank > 0 && data_.size() % rank == 0, ErrorKind::invalid_argument, "patch key: ragged rows");
    detail::sort_rows(data_, rank_);
    bool has_zero = false;
    for (std::size_t i = 0; i < size(); ++i) {
      auto row = (*this)[i];
      if (std::all_of(row.begin(), row.end(), [](std::int64_t v) { return v == 0; })) has_zero = true;
      if (i > 0 && detail::rows_equal(row.data(), (*this)[i - 1].data(), rank_))
        fail(ErrorKind::invalid_argument, "patch key: duplicate difference vector");
    }
    require(has_zero, ErrorKind::invalid_argument, "patch key must contain the zero vector");
  }

  int rank() const { return rank_; }
  std::size_t size() const { return rank_ ? data_.size() / rank_ : 0; }
  std::span<const std::int64_t> operator[](std::size_t i) const {
    return {data_.data() + i * rank_, static_cast<std::size_t>(rank_)};
  }
  const std::vector<std::int64_t>& flat() const { return data_; }

  friend bool operator==(const PatchKey& a, const PatchKey& b) {
    return a.rank_ == b.rank_ && a.data_ == b.data_;
  }
  friend bool operator<(const PatchKey& a, const PatchKey& b) {
    if (a.rank_ != b.rank_) return a.rank_ < b.rank_;
    return a.data_ < b.data_;
  }

  struct Hash {
    std::size_t operator()(const PatchKey& k) const noexcept {
      std::uint64_t h = 1469598103934665603ULL;
      for (std::int64_t v : k.data_) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ULL;
      }
      return static_cast<std::size_t>(h);
    }
  };

 private:
  int rank_ = 0;
  std::vector<std::int64_t> data_;
};

/// Finite window of a Delone set given by integer addresses in Z^s and a
/// real projection pi: Z^s -> R^n. The list is complete for `region`.
/// Addresses are kept sorted lexicographically.
class ExactPointSet {
 public:
  /// `projection` is row-major s x n: row i is the image of the i-th address
  /// basis vector.
  ExactPointSet(int dimension, int rank, std::vector<double> projection, std::vector<std::int64_t> addresses,
                Region region)
      : dim_(dimension), rank_(rank), proj_(std::move(projection)), addr_(std::move(addresses)),
        region_(std::move(region)) {
    require(dim_ >= 1, ErrorKind::invalid_argument, "dimension must be >= 1");
    require(rank_ >= dim_, ErrorKind::invalid_argument, "rank must be >= dimension");
    require(proj_.size() == static_cast<std::size_t>(rank_ * dim_), ErrorKind::invalid_argument,
            "projection must be rank x dimension");
    require(addr_.size() % rank_ == 0, ErrorKind::invalid_argument, "address rows must have length rank");
    require(region_.dimension() == dim_, ErrorKind::invalid_argument, "region dimension mismatch");
    detail::sort_rows(addr_, rank_);
    for (std::size_t i = 1; i < size(); ++i)
      require(!detail::rows_equal(addr_.data() + (i - 1) * rank_, addr_.data() + i * rank_, rank_),
              ErrorKind::invalid_argument, "duplicate address in point set");
    pts_.resize(size() * dim_);
    for (std::size_t i = 0; i < size(); ++i) {
      project_into(address(i), {pts_.data() + i * dim_, static_cast<std::size_t>(dim_)});
      require(region_.contains(point(i)), ErrorKind::invalid_argument, "projected point lies outside region");
    }
  }

  int dimension() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return addr_.size() / rank_; }
  bool empty() const { return addr_.empty(); }
  const Region& region() const { return region_; }
  const std::vector<double>& projection() const { return proj_; }
  const std::vector<std::int64_t>& addresses() const { return addr_; }
  const std::vector<double>& points() const { return pts_; }

  std::span<const std::int64_t> address(std::size_t i) const {
    return {addr_.data() + i * rank_, static_cast<std::size_t>(rank_)};
  }
  std::span<const double> point(std::size_t i) const {
    return {pts_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  Vec project(std::span<const std::int64_t> a) const {
    require(a.size() == static_cast<std::size_t>(rank_), ErrorKind::invalid_argument,
            "address length must equal rank");
    Vec out(dim_);
    project_into(a, out);
    return out;
  }

  /// Squared norm of pi(a), accumulated in a fixed order.
  double projected_norm2(std::span<const std::int64_t> a) const {
    double n2 = 0.0;
    for (int j = 0; j < dim_; ++j) {
      double v = 0.0;
      for (int i = 0; i < rank_; ++i) v += static_cast<double>(a[i]) * proj_[i * dim_ + j];
      n2 += v * v;
    }
    return n2;
  }

  std::optional<std::size_t> find(std::span<const std::int64_t> a) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (detail::lex_less(address(mid), a)) lo = mid + 1;
      else hi = mid;
    }
    if (lo < size() && std::equal(a.begin(), a.end(), address(lo).begin())) return lo;
    return std::nullopt;
  }

  /// The points of this set inside `sub` (which must lie in region()).
  ExactPointSet restricted(const Region& sub) const {
    std::vector<std::int64_t> kept;
    for (std::size_t i = 0; i < size(); ++i)
      if (sub.contains(point(i))) kept.insert(kept.end(), address(i).begin(), address(i).end());
    return ExactPointSet(dim_, rank_, proj_, std::move(kept), sub);
  }

  friend bool operator==(const ExactPointSet& a, const ExactPointSet& b) {
    return a.dim_ == b.dim_ && a.rank_ == b.rank_ && a.proj_ == b.proj_ && a.addr_ == b.addr_ &&
           a.region_ == b.region_;
  }

 private:
  void project_into(std::span<const std::int64_t> a, std::span<double> out) const {
    for (int j = 0; j < dim_; ++j) {
      double v = 0.0;
      for (int i = 0; i < rank_; ++i) v += static_cast<double>(a[i]) * proj_[i * dim_ + j];
      out[j] = v;
    }
  }

  int dim_;
  int rank_;
  std::vector<double> proj_;
  std::vector<std::int64_t> addr_;
  std::vector<double> pts_;
  Region region_;
};

/// pi * address.
inline Vec project(const ExactPointSet& set, std::span<const std::int64_t> address) {
  return set.project(address);
}

/// Imported real-coordinate point set; coincidence is decided with `tolerance`.
class FloatPointSet {
 public:
  FloatPointSet(int dimension, std::vector<double> points, Region region, double tolerance)
      : dim_(dimension), pts_(std::move(points)), region_(std::move(region)), tol_(tolerance) {
    require(dim_ >= 1, ErrorKind::invalid_argument, "dimension must be >= 1");
    require(tol_ > 0.0, ErrorKind::invalid_argument, "tolerance must be positive");
    require(pts_.size() % dim_ == 0, ErrorKind::invalid_argument, "point rows must have length dimension");
    require(region_.dimension() == dim_, ErrorKind::invalid_argument, "region dimension mismatch");
    for (std::size_t i = 0; i < size(); ++i)
      require(region_.contains(point(i)), ErrorKind::invalid_argument,
              "point " + std::to_string(i) + " lies outside region");
    SpatialGrid grid(pts_, dim_, std::max(tol_, 1e-12) * 4.0);
    std::string offenders;
    for (std::size_t i = 0; i < size(); ++i) {
      grid.for_each_within(point(i), tol_, [&](std::size_t j, double) {
        if (j > i) offenders += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
      });
    }
    require(offenders.empty(), ErrorKind::invalid_argument,
            "points closer than tolerance:" + offenders);
  }

  int dimension() const { return dim_; }
  std::size_t size() const { return pts_.size() / dim_; }
  const Region& region() const { return region_; }
  double tolerance() const { return tol_; }
  const std::vector<double>& points() const { return pts_; }
  std::span<const double> point(std::size_t i) const {
    return {pts_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  friend bool operator==(const FloatPointSet& a, const FloatPointSet& b) {
    return a.dim_ == b.dim_ && a.pts_ == b.pts_ && a.region_ == b.region_ && a.tol_ == b.tol_;
  }

 private:
  int dim_;
  std::vector<double> pts_;
  Region region_;
  double tol_;
};

inline FloatPointSet to_float_set(const ExactPointSet& set, double tolerance = 1e-9) {
  return FloatPointSet(set.dimension(), set.points(), set.region(), tolerance);
}

/// Minimum distance between distinct points of a flat n-dimensional list.
inline double min_pair_distance(std::span<const double> pts, int dim) {
  const std::size_t count = pts.size() / dim;
  require(count >= 2, ErrorKind::insufficient_data, "need at least two points");
  if (dim == 1) {
    std::vector<double> s(pts.begin(), pts.end());
    std::sort(s.begin(), s.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, s[i] - s[i - 1]);
    return best;
  }
  Vec lo(dim, std::numeric_limits<double>::infinity()), hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < count; ++i)
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], pts[i * dim + a]);
      hi[a] = std::max(hi[a], pts[i * dim + a]);
    }
  double vol = 1.0;
  for (int a = 0; a < dim; ++a) vol *= std::max(hi[a] - lo[a], 1e-9);
  double h = std::pow(vol / static_cast<double>(count), 1.0 / dim);
  while (true) {
    SpatialGrid grid(pts, dim, h);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i)
      grid.for_each_within(pts.subspan(i * dim, dim), h, [&](std::size_t j, double d2) {
        if (j != i) best = std::min(best, std::sqrt(d2));
      });
    if (std::isfinite(best)) return best;
    h *= 2.0;
  }
}

struct DeloneConstants {
  double r = 0.0;        ///< packing radius: half the minimum interpoint distance
  double R = 0.0;        ///< covering radius, lower end of its bracket
  double R_upper = 0.0;  ///< covering radius, upper end (== R in dimension 1)
  Region certified_region = Region::cube(1, 1.0);  ///< eroded region R was measured on
};

namespace detail {

inline DeloneConstants delone_constants_impl(std::span<const double> pts, int dim, const Region& region) {
  DeloneConstants out;
  out.r = 0.5 * min_pair_distance(pts, dim);
  const double resolution = out.r / 4.0;
  Region current = region;
  CoveringBracket cover = covering_radius(pts, dim, current, resolution);
  // Erode by the running estimate so the window edge does not inflate R.
  for (int iter = 0; iter < 8; ++iter) {
    auto eroded = region.eroded(cover.upper);
    if (!eroded) break;
    CoveringBracket next = covering_radius(pts, dim, *eroded, resolution);
    current = *eroded;
    bool stable = next.lower == cover.lower && next.upper == cover.upper;
    cover = next;
    if (stable) break;
  }
  out.R = cover.lower;
  out.R_upper = cover.upper;
  out.certified_region = current;
  return out;
}

}  // namespace detail

/// Delone constants (r, R) measured on the window.
inline DeloneConstants delone_constants(const ExactPointSet& set) {
  return detail::delone_constants_impl(set.points(), set.dimension(), set.region());
}

inline DeloneConstants delone_constants(const FloatPointSet& set) {
  return detail::delone_constants_impl(set.points(), set.dimension(), set.region());
}

/// The natural-topology functional d_k(F1, F2) from the hull topology.
/// Not a metric: it fails the triangle inequality. Empty intersections with
/// B(0; k) make the inclusion vacuous, giving 0.
inline double natural_distance(const FloatPointSet& f1, const FloatPointSet& f2, double k) {
  require(f1.dimension() == f2.dimension(), ErrorKind::invalid_argument, "natural distance: dimension mismatch");
  require(k > 0.0, ErrorKind::invalid_argument, "natural distance: k must be positive");
  const int dim = f1.dimension();
  auto one_sided = [&](const FloatPointSet& a, const FloatPointSet& b) {
    double worst = 0.0;
    std::optional<SpatialGrid> grid;
    if (b.size() > 0) grid.emplace(b.points(), dim, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto p = a.point(i);
      double n2 = 0.0;
      for (double v : p) n2 += v * v;
      if (n2 > k * k) continue;
      if (!grid) return 1.0;
      auto hit = grid->nearest(p, 1.0);
      worst = std::max(worst, hit ? hit->distance : 1.0);
      if (worst >= 1.0) return 1.0;
    }
    return worst;
  };
  return std::min(1.0, std::max(one_sided(f1, f2), one_sided(f2, f1)));
}

}  // namespace delone
