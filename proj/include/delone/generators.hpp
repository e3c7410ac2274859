#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <set>
#include <utility>
#include <string>
#include <vector>

#include <json.hpp>

#include "delone/contfrac.hpp"
#include "delone/error.hpp"
#include "delone/point_set.hpp"
#include "delone/region.hpp"

namespace delone {

/// A construction that can produce its points inside any requested region.
/// `materialize` must be consistent: materialising a subregion gives the
/// restriction of the larger result.
struct PointSetSource {
  std::string name;
  nlohmann::json params;
  int dimension = 1;
  int rank = 1;
  double covering_hint = 1.0;  // rough covering radius, used to size windows
  std::function<ExactPointSet(const Region&)> materialize_fn;

  ExactPointSet materialize(const Region& region) const {
    require(region.dimension() == dimension, ErrorKind::invalid_argument,
            name + ": region dimension " + std::to_string(region.dimension()) + " != " + std::to_string(dimension));
    return materialize_fn(region);
  }

  nlohmann::json descriptor() const { return {{"name", name}, {"params", params}}; }
};

namespace detail {

/// Integer range [ceil(lo), floor(hi)] along each axis of the bounding box.
inline void integer_bounds(const Region& region, double pad, std::vector<std::int64_t>& lo,
                           std::vector<std::int64_t>& hi) {
  const Region bb = region.bounding_box();
  const int n = region.dimension();
  lo.resize(n);
  hi.resize(n);
  for (int a = 0; a < n; ++a) {
    lo[a] = static_cast<std::int64_t>(std::ceil(bb.lo()[a] - pad));
    hi[a] = static_cast<std::int64_t>(std::floor(bb.hi()[a] + pad));
  }
}

/// Calls fn(x) for every integer vector in the box [lo, hi] (last axis fastest).
template <class Fn>
void for_each_lattice_point(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi, Fn&& fn) {
  const std::size_t n = lo.size();
  for (std::size_t a = 0; a < n; ++a)
    if (lo[a] > hi[a]) return;
  IVec x(lo);
  while (true) {
    fn(std::as_const(x));
    std::size_t a = n;
    while (a > 0) {
      --a;
      if (x[a] < hi[a]) {
        ++x[a];
        break;
      }
      x[a] = lo[a];
      if (a == 0) return;
    }
  }
}

inline std::vector<double> identity_projection(int n, double scale = 1.0) {
  std::vector<double> p(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) p[i * n + i] = scale;
  return p;
}

inline bool contains_int(const Region& region, const IVec& x, double scale = 1.0) {
  Vec p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = static_cast<double>(x[i]) * scale;
  return region.contains(p);
}

}  // namespace detail

/// Z^n with the listed points removed; addresses are the coordinates.
inline PointSetSource gen_integer_lattice(int n, std::vector<IVec> deletions = {}) {
  require(n >= 1, ErrorKind::invalid_argument, "lattice dimension must be >= 1");
  for (const auto& d : deletions)
    require(d.size() == static_cast<std::size_t>(n), ErrorKind::invalid_argument,
            "deleted point has wrong dimension");
  std::set<IVec> removed(deletions.begin(), deletions.end());
  PointSetSource src;
  src.name = "zn";
  src.params = {{"n", n}, {"deletions", deletions}};
  src.dimension = n;
  src.rank = n;
  src.covering_hint = 0.5 * std::sqrt(static_cast<double>(n));
  src.materialize_fn = [n, removed = std::move(removed)](const Region& region) {
    std::vector<std::int64_t> lo, hi, addr;
    detail::integer_bounds(region, 0.0, lo, hi);
    detail::for_each_lattice_point(lo, hi, [&](const IVec& x) {
      if (!removed.contains(x) && detail::contains_int(region, x)) addr.insert(addr.end(), x.begin(), x.end());
    });
    return ExactPointSet(n, n, detail::identity_projection(n), std::move(addr), region);
  };
  return src;
}

/// b_k = floor((k+1) alpha) - floor(k alpha) for k = start .. start+length-1.
inline std::vector<int> beatty_word(const ContinuedFraction& alpha, std::int64_t start, std::size_t length) {
  std::vector<int> word(length);
  std::int64_t prev = alpha.floor_multiple(start);
  for (std::size_t i = 0; i < length; ++i) {
    std::int64_t next = alpha.floor_multiple(start + static_cast<std::int64_t>(i) + 1);
    word[i] = static_cast<int>(next - prev);
    prev = next;
  }
  return word;
}

/// Beatty point set: x_0 = 0 and gap x_{i+1} - x_i is 1 when b_i = 0 and tau
/// when b_i = 1. The address of x_i counts (unit gaps, tau gaps) from the
/// origin, i.e. (i - floor(i alpha), floor(i alpha)), with pi = [1, tau].
inline PointSetSource gen_beatty(const ContinuedFraction& alpha, double tau) {
  require(tau > 1.0, ErrorKind::invalid_argument, "tau must exceed 1");
  const double a = alpha.value();
  require(a > 0.0 && a < 1.0, ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
  PointSetSource src;
  src.name = "beatty";
  src.params = {{"alpha", alpha.label()}, {"tau", tau}};
  src.rank = 2;
  src.covering_hint = 0.5 * tau;
  src.materialize_fn = [alpha, tau](const Region& region) {
    const Region bb = region.bounding_box();
    const double lo = bb.lo()[0], hi = bb.hi()[0];
    // x_i / i lies in [1, tau], which brackets the index range
    const auto i_lo = static_cast<std::int64_t>(std::floor(std::min(lo, lo / tau))) - 1;
    const auto i_hi = static_cast<std::int64_t>(std::ceil(std::max(hi, hi / tau))) + 1;
    std::vector<std::int64_t> addr;
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
      std::int64_t f = alpha.floor_multiple(i);
      double x = static_cast<double>(i - f) + tau * static_cast<double>(f);
      if (region.contains(std::span<const double>(&x, 1))) {
        addr.push_back(i - f);
        addr.push_back(f);
      }
    }
    return ExactPointSet(1, 2, {1.0, tau}, std::move(addr), region);
  };
  return src;
}

/// The Fibonacci chain: golden Beatty word with tile lengths 1 and tau.
inline PointSetSource gen_fibonacci() {
  auto src = gen_beatty(ContinuedFraction::golden(), std::numbers::phi);
  src.name = "fibonacci";
  src.params = nlohmann::json::object();
  return src;
}

/// Lattice points (m, p) with p - alpha m in [0, 1), projected orthogonally
/// onto the line of slope alpha. Addresses are (m, p); the two gap lengths are
/// 1/sqrt(1+alpha^2) and (1+alpha)/sqrt(1+alpha^2).
inline PointSetSource gen_cut_project_1d(const ContinuedFraction& alpha) {
  require(!alpha.is_finite(), ErrorKind::invalid_argument,
          "cut-and-project needs irrational alpha (an infinite continued fraction)");
  const double a = alpha.value();
  require(a > 0.0 && a < 1.0, ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
  const double c = std::sqrt(1.0 + a * a);
  PointSetSource src;
  src.name = "cut-project";
  src.params = {{"alpha", alpha.label()}};
  src.rank = 2;
  src.covering_hint = 0.5 * (1.0 + a) / c;
  src.materialize_fn = [alpha, a, c](const Region& region) {
    const Region bb = region.bounding_box();
    // t_m lies in [m c, m c + alpha / c)
    const auto m_lo = static_cast<std::int64_t>(std::floor((bb.lo()[0] - 1.0) / c)) - 1;
    const auto m_hi = static_cast<std::int64_t>(std::ceil(bb.hi()[0] / c)) + 1;
    const std::vector<double> proj{1.0 / c, a / c};
    std::vector<std::int64_t> addr;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
      std::int64_t p = alpha.ceil_multiple(m);
      double t = static_cast<double>(m) * proj[0] + static_cast<double>(p) * proj[1];
      if (region.contains(std::span<const double>(&t, 1))) {
        addr.push_back(m);
        addr.push_back(p);
      }
    }
    return ExactPointSet(1, 2, proj, std::move(addr), region);
  };
  return src;
}

/// Cartesian product; dimensions and ranks add, the projection is block
/// diagonal. Non-box regions are filled through their bounding box.
inline PointSetSource gen_product(std::vector<PointSetSource> sources) {
  require(sources.size() >= 2, ErrorKind::invalid_argument, "product needs at least two sources");
  PointSetSource src;
  src.name = "product";
  src.params = {{"factors", nlohmann::json::array()}};
  src.dimension = 0;
  src.rank = 0;
  double hint2 = 0.0;
  for (const auto& s : sources) {
    src.params["factors"].push_back(s.descriptor());
    src.dimension += s.dimension;
    src.rank += s.rank;
    hint2 += s.covering_hint * s.covering_hint;
  }
  src.covering_hint = std::sqrt(hint2);
  src.materialize_fn = [sources = std::move(sources), n = src.dimension, s = src.rank](const Region& region) {
    const Region bb = region.bounding_box();
    std::vector<ExactPointSet> parts;
    int axis = 0;
    for (const auto& f : sources) {
      Vec lo(bb.lo().begin() + axis, bb.lo().begin() + axis + f.dimension);
      Vec hi(bb.hi().begin() + axis, bb.hi().begin() + axis + f.dimension);
      parts.push_back(f.materialize(Region::box(lo, hi)));
      axis += f.dimension;
    }
    std::vector<double> proj(static_cast<std::size_t>(s) * n, 0.0);
    int row = 0, col = 0;
    for (const auto& p : parts) {
      for (int i = 0; i < p.rank(); ++i)
        for (int j = 0; j < p.dimension(); ++j) proj[(row + i) * n + col + j] = p.projection()[i * p.dimension() + j];
      row += p.rank();
      col += p.dimension();
    }
    std::vector<std::int64_t> addr;
    std::vector<std::size_t> idx(parts.size(), 0);
    for (const auto& p : parts)
      if (p.empty()) return ExactPointSet(n, s, proj, {}, region);
    Vec pt(n);
    while (true) {
      int c = 0;
      for (std::size_t f = 0; f < parts.size(); ++f)
        for (double v : parts[f].point(idx[f])) pt[c++] = v;
      if (region.contains(pt))
        for (std::size_t f = 0; f < parts.size(); ++f) {
          auto a = parts[f].address(idx[f]);
          addr.insert(addr.end(), a.begin(), a.end());
        }
      std::size_t f = parts.size();
      while (f > 0) {
        --f;
        if (++idx[f] < parts[f].size()) break;
        idx[f] = 0;
        if (f == 0) return ExactPointSet(n, s, proj, std::move(addr), region);
      }
    }
  };
  return src;
}

/// Deepest level j <= J whose line systems contain x (0 when none). Level-j
/// lines: S_x = {y = a_j, z = -a_j (mod 4 a_j)} and its cyclic shifts.
inline int deleted_lines_level(const std::vector<std::int64_t>& a, std::span<const std::int64_t> x) {
  auto mod = [](std::int64_t v, std::int64_t m) { return ((v % m) + m) % m; };
  int deepest = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::int64_t m = 4 * a[j], plus = mod(a[j], m), minus = mod(-a[j], m);
    bool on = false;
    for (int axis = 0; axis < 3 && !on; ++axis) {
      std::int64_t u = mod(x[(axis + 1) % 3], m), v = mod(x[(axis + 2) % 3], m);
      on = u == plus && v == minus;
    }
    if (!on) break;  // level-j lines sit inside level-(j-1) lines
    deepest = static_cast<int>(j) + 1;
  }
  return deepest;
}

inline void validate_deleted_lines_sequence(const std::vector<std::int64_t>& a) {
  require(!a.empty(), ErrorKind::invalid_argument, "deleted-lines sequence must be nonempty");
  require(a[0] >= 1, ErrorKind::invalid_argument, "a_1 must be >= 1");
  for (std::size_t j = 1; j < a.size(); ++j) {
    bool ok = a[j] > a[j - 1] && a[j] % a[j - 1] == 0 && (a[j] / a[j - 1]) % 4 == 1;
    require(ok, ErrorKind::invalid_argument,
            "a_" + std::to_string(j + 1) + " must equal (4b+1) a_" + std::to_string(j) + " with b >= 1");
  }
}

/// Z^3 with the three line systems removed at odd levels and restored at
/// even levels, up to level J = a.size().
inline PointSetSource gen_deleted_lines(std::vector<std::int64_t> a) {
  validate_deleted_lines_sequence(a);
  PointSetSource src;
  src.name = "deleted-lines";
  src.params = {{"a", a}};
  src.dimension = 3;
  src.rank = 3;
  src.covering_hint = 0.5 * std::sqrt(3.0);
  src.materialize_fn = [a = std::move(a)](const Region& region) {
    std::vector<std::int64_t> lo, hi, addr;
    detail::integer_bounds(region, 0.0, lo, hi);
    detail::for_each_lattice_point(lo, hi, [&](const IVec& x) {
      if (deleted_lines_level(a, x) % 2 == 1) return;
      if (detail::contains_int(region, x)) addr.insert(addr.end(), x.begin(), x.end());
    });
    return ExactPointSet(3, 3, detail::identity_projection(3), std::move(addr), region);
  };
  return src;
}

/// Parameters of the hierarchical two-coloring of Z^n.
struct TwoColorParams {
  int n = 1;
  std::vector<std::int64_t> a;  // a_1, a_2, ...; each an even n-th power above N
  double product_floor = 0.05;  // lower bound required of prod (1 - N/a_j)

  std::int64_t N() const { return std::int64_t{1} << ((std::int64_t{1} << n) + n); }

  /// Side of the level-j pattern, a_j^{1/n}.
  std::int64_t side(std::size_t j) const {
    auto s = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(a[j]), 1.0 / n)));
    for (std::int64_t t : {s - 1, s, s + 1}) {
      std::int64_t p = 1;
      for (int i = 0; i < n; ++i) p *= t;
      if (t > 0 && p == a[j]) return t;
    }
    return 0;
  }

  /// Cumulative side s_k = (a_1 ... a_k)^{1/n} of the cube C_k.
  std::int64_t scale(std::size_t k) const {
    std::int64_t s = 1;
    for (std::size_t j = 0; j < k; ++j) s *= side(j);
    return s;
  }

  void validate() const {
    require(n >= 1 && n <= 3, ErrorKind::invalid_argument, "two-color dimension must be 1..3");
    require(!a.empty(), ErrorKind::invalid_argument, "two-color sequence must be nonempty");
    double prod = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      require(a[j] > N(), ErrorKind::invalid_argument, "every a_k must exceed N = " + std::to_string(N()));
      std::int64_t s = side(j);
      require(s > 0 && s % 2 == 0, ErrorKind::invalid_argument,
              "a_" + std::to_string(j + 1) + " must be an even n-th power");
      prod *= 1.0 - static_cast<double>(N()) / static_cast<double>(a[j]);
    }
    require(prod > product_floor, ErrorKind::invalid_argument, "partial product fell below the configured floor");
    // keep the total side within int64 reach
    double log_side = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) log_side += std::log2(static_cast<double>(side(j)));
    require(log_side < 60.0, ErrorKind::resource_limit, "two-color hierarchy too deep for 64-bit coordinates");
  }
};

namespace detail {

/// Colour of cell `digit` (n coordinates in [0, side)) in the level pattern:
/// vertex-type blocks of side 2 packed lexicographically, block b colouring
/// its local cell j black iff bit j of b is set; black filler elsewhere.
inline bool pattern_black(int n, std::int64_t side, const std::int64_t* digit) {
  const std::int64_t blocks_per_axis = side / 2;
  std::int64_t block = 0, local = 0;
  for (int i = 0; i < n; ++i) {
    block = block * blocks_per_axis + digit[i] / 2;
    local |= (digit[i] % 2) << i;
  }
  const std::int64_t types = std::int64_t{1} << (std::int64_t{1} << n);
  if (block >= types) return true;
  return (block >> local) & 1;
}

}  // namespace detail

/// White/black colour of the unit cube whose lower corner is x. Negative
/// coordinates are reflected, m -> -m - 1.
inline bool two_color_is_white(const TwoColorParams& params, std::span<const std::int64_t> x) {
  const int n = params.n;
  std::int64_t c[3];
  for (int i = 0; i < n; ++i) c[i] = x[i] < 0 ? -x[i] - 1 : x[i];
  bool white = true;
  std::int64_t digit[3];
  for (std::size_t j = 0; j < params.a.size(); ++j) {
    const std::int64_t s = params.side(j);
    bool rest = false;
    for (int i = 0; i < n; ++i) {
      digit[i] = c[i] % s;
      c[i] /= s;
      rest = rest || c[i] != 0;
    }
    if (detail::pattern_black(n, s, digit)) white = !white;
    if (!rest) return white;
  }
  for (int i = 0; i < n; ++i)
    require(c[i] == 0, ErrorKind::needs_more_terms, "two-color point lies beyond the available levels");
  return white;
}

/// Number of white cells among the lattice points of [-s, s)^n (the central
/// cube made of 2^n reflected copies of C_k when s = s_k).
inline std::int64_t two_color_white_count(const TwoColorParams& params, std::int64_t s) {
  std::vector<std::int64_t> lo(params.n, -s), hi(params.n, s - 1);
  std::int64_t whites = 0;
  detail::for_each_lattice_point(lo, hi, [&](const IVec& x) { whites += two_color_is_white(params, x); });
  return whites;
}

/// The coded Meyer set: a white lattice point x keeps address 3x, a black one
/// becomes the pair 3x +- (1, ..., 1). The projection is I/3.
inline PointSetSource gen_two_color(TwoColorParams params) {
  params.validate();
  PointSetSource src;
  src.name = "two-color";
  src.params = {{"n", params.n}, {"a", params.a}, {"coding", "pair-offset"}};
  src.dimension = params.n;
  src.rank = params.n;
  src.covering_hint = 0.5 * std::sqrt(static_cast<double>(params.n));
  src.materialize_fn = [params](const Region& region) {
    const int n = params.n;
    std::vector<std::int64_t> lo, hi, addr;
    detail::integer_bounds(region, 1.0 / 3.0, lo, hi);
    const std::vector<double> proj = detail::identity_projection(n, 1.0 / 3.0);
    IVec code(n);
    auto emit = [&](const IVec& c) {
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = static_cast<double>(c[i]) * (1.0 / 3.0);
      if (region.contains(p)) addr.insert(addr.end(), c.begin(), c.end());
    };
    detail::for_each_lattice_point(lo, hi, [&](const IVec& x) {
      if (two_color_is_white(params, x)) {
        for (int i = 0; i < n; ++i) code[i] = 3 * x[i];
        emit(code);
      } else {
        for (int sign : {-1, 1}) {
          for (int i = 0; i < n; ++i) code[i] = 3 * x[i] + sign;
          emit(code);
        }
      }
    });
    return ExactPointSet(n, n, proj, std::move(addr), region);
  };
  return src;
}

struct RhoSequence {
  std::vector<Rational> recursion;    // rho_0 .. rho_K
  std::vector<Rational> closed_form;  // 1/2 + (-1)^k/2 prod (1 - N/a_j)
  std::vector<Rational> product;      // prod_{j <= k} (1 - N/a_j)
};

inline RhoSequence rho_sequence(const TwoColorParams& params, std::size_t K) {
  require(K <= params.a.size(), ErrorKind::needs_more_terms, "rho_K needs K terms of the sequence");
  const Rational N(params.N());
  RhoSequence out;
  Rational rho(1), prod(1);
  out.recursion.push_back(rho);
  out.closed_form.push_back(Rational(1));
  out.product.push_back(prod);
  for (std::size_t k = 1; k <= K; ++k) {
    const Rational a(params.a[k - 1]);
    const Rational w = N / (2 * a);
    rho = w * rho + (1 - w) * (1 - rho);
    prod *= 1 - N / a;
    out.recursion.push_back(rho);
    out.product.push_back(prod);
    Rational half(1, 2);
    out.closed_form.push_back(half + (k % 2 ? -half : half) * prod);
  }
  return out;
}

}  // namespace delone
