#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "delone/error.hpp"

namespace delone {

using Vec = std::vector<double>;

/// Volume of the unit ball in R^n, by kappa_n = kappa_{n-2} 2 pi / n so that
/// kappa_1 is exactly 2.
inline double unit_ball_volume(int n) {
  double k = n % 2 ? 2.0 : 1.0;
  for (int m = n % 2 ? 3 : 2; m <= n; m += 2) k *= 2.0 * std::numbers::pi / m;
  return k;
}

/// A closed axis-aligned box or a closed Euclidean ball.
class Region {
 public:
  enum class Kind { box, ball };

  static Region box(Vec lo, Vec hi) {
    require(!lo.empty() && lo.size() == hi.size(), ErrorKind::invalid_argument,
            "box bounds must be nonempty and of equal dimension");
    for (std::size_t i = 0; i < lo.size(); ++i)
      require(lo[i] < hi[i], ErrorKind::invalid_argument, "box needs a_i < b_i on every axis");
    Region r;
    r.kind_ = Kind::box;
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
  }

  /// Box [-half, half]^n.
  static Region cube(int n, double half) { return cube(Vec(n, 0.0), half); }

  static Region cube(const Vec& center, double half) {
    Vec lo(center), hi(center);
    for (std::size_t i = 0; i < center.size(); ++i) {
      lo[i] -= half;
      hi[i] += half;
    }
    return box(std::move(lo), std::move(hi));
  }

  static Region ball(Vec center, double radius) {
    require(!center.empty(), ErrorKind::invalid_argument, "ball center must be nonempty");
    require(radius >= 0.0, ErrorKind::invalid_argument, "ball radius must be >= 0");
    Region r;
    r.kind_ = Kind::ball;
    r.lo_ = std::move(center);
    r.radius_ = radius;
    return r;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_box() const noexcept { return kind_ == Kind::box; }
  int dimension() const noexcept { return static_cast<int>(lo_.size()); }

  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const Vec& center() const { return lo_; }
  double radius() const noexcept { return radius_; }

  bool contains(std::span<const double> p) const {
    if (kind_ == Kind::box) {
      for (std::size_t i = 0; i < lo_.size(); ++i)
        if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
      return true;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) d2 += (p[i] - lo_[i]) * (p[i] - lo_[i]);
    return d2 <= radius_ * radius_;
  }

  /// Distance from p to the complement of the region; 0 outside.
  double depth(std::span<const double> p) const {
    double d;
    if (kind_ == Kind::box) {
      d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lo_.size(); ++i) d = std::min({d, p[i] - lo_[i], hi_[i] - p[i]});
    } else {
      double d2 = 0.0;
      for (std::size_t i = 0; i < lo_.size(); ++i) d2 += (p[i] - lo_[i]) * (p[i] - lo_[i]);
      d = radius_ - std::sqrt(d2);
    }
    return std::max(d, 0.0);
  }

  /// Points whose distance-d neighbourhood stays inside this region.
  /// Empty (nullopt) when nothing survives.
  std::optional<Region> eroded(double d) const {
    if (kind_ == Kind::ball) {
      if (radius_ - d < 0.0) return std::nullopt;
      return ball(lo_, radius_ - d);
    }
    Vec lo(lo_), hi(hi_);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] += d;
      hi[i] -= d;
      if (!(lo[i] < hi[i])) return std::nullopt;
    }
    return box(std::move(lo), std::move(hi));
  }

  Region grown(double d) const {
    if (kind_ == Kind::ball) return ball(lo_, radius_ + d);
    Vec lo(lo_), hi(hi_);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= d;
      hi[i] += d;
    }
    return box(std::move(lo), std::move(hi));
  }

  Region bounding_box() const {
    if (kind_ == Kind::box) return *this;
    Vec lo(lo_), hi(lo_);
    double r = std::max(radius_, 1e-300);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= r;
      hi[i] += r;
    }
    return box(std::move(lo), std::move(hi));
  }

  double side(int axis) const {
    return kind_ == Kind::box ? hi_[axis] - lo_[axis] : 2.0 * radius_;
  }

  double volume() const {
    if (kind_ == Kind::ball) return unit_ball_volume(dimension()) * std::pow(radius_, dimension());
    double v = 1.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
    return v;
  }

  /// sigma(B) = 2 vol(B) sum 1/l_i (boxes only).
  double surface_area() const {
    require(kind_ == Kind::box, ErrorKind::invalid_argument, "surface area is defined for boxes");
    double s = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) s += 1.0 / (hi_[i] - lo_[i]);
    return 2.0 * volume() * s;
  }

  /// omega(B) = min side length.
  double width() const {
    if (kind_ == Kind::ball) return 2.0 * radius_;
    double w = hi_[0] - lo_[0];
    for (std::size_t i = 1; i < lo_.size(); ++i) w = std::min(w, hi_[i] - lo_[i]);
    return w;
  }

  /// True when `inner` lies entirely inside this region.
  bool encloses(const Region& inner) const {
    Region bb = inner.bounding_box();
    if (kind_ == Kind::box) {
      for (std::size_t i = 0; i < lo_.size(); ++i)
        if (bb.lo_[i] < lo_[i] || bb.hi_[i] > hi_[i]) return false;
      return true;
    }
    if (inner.kind_ == Kind::ball) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < lo_.size(); ++i)
        d2 += (inner.lo_[i] - lo_[i]) * (inner.lo_[i] - lo_[i]);
      return std::sqrt(d2) + inner.radius_ <= radius_;
    }
    // box inside ball: farthest corner
    double d2 = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      double a = std::abs(inner.lo_[i] - lo_[i]), b = std::abs(inner.hi_[i] - lo_[i]);
      d2 += std::max(a, b) * std::max(a, b);
    }
    return d2 <= radius_ * radius_;
  }

  /// Closest point of the region to p.
  Vec clamp(std::span<const double> p) const {
    Vec q(p.begin(), p.end());
    if (kind_ == Kind::box) {
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::clamp(q[i], lo_[i], hi_[i]);
      return q;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) d2 += (q[i] - lo_[i]) * (q[i] - lo_[i]);
    double d = std::sqrt(d2);
    if (d <= radius_) return q;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = lo_[i] + (q[i] - lo_[i]) * (radius_ / d);
    return q;
  }

  friend bool operator==(const Region& a, const Region& b) {
    return a.kind_ == b.kind_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.radius_ == b.radius_;
  }

 private:
  Region() = default;

  Kind kind_ = Kind::box;
  Vec lo_;  // box lower corner, or ball center
  Vec hi_;
  double radius_ = 0.0;
};

}  // namespace delone
