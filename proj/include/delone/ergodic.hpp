#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "delone/atlas.hpp"
#include "delone/error.hpp"
#include "delone/generators.hpp"
#include "delone/parallel.hpp"
#include "delone/point_set.hpp"
#include "delone/region.hpp"

namespace delone {

/// A box function w(B) with values in R^components. The three constants are
/// declared by whoever builds the distribution; only the volume bound is
/// spot-checked (see check_volume_bound).
struct WeightDistribution {
  std::string name;
  int dimension = 1;
  std::size_t components = 1;
  std::function<std::vector<double>(const Region&)> evaluate;
  double U0 = 0.0;                  // boxes must be wider than this
  double volume_bound = 1.0;        // |w(B)| <= C vol(B)
  double translation_bound = 0.0;   // declared, not verified
  double additivity_bound = 0.0;    // declared, not verified
};

struct DensityRow {
  double U;
  std::vector<double> f_plus;   // sampled sup of w(B)/vol(B), per component
  std::vector<double> f_minus;  // sampled inf
  std::vector<double> f_zero;   // sampled median
  std::vector<double> delta;    // f_plus - f_minus
  std::size_t lattice_boxes;
  std::size_t random_boxes;
};

struct DensityProfile {
  std::vector<DensityRow> rows;
  std::uint64_t seed = 0;
};

struct DensityOptions {
  std::size_t random_boxes = 200;
  std::size_t max_lattice_boxes = 4096;
  std::size_t min_boxes = 30;
  std::uint64_t seed = 0;
};

namespace detail {

/// Squarish boxes with sides in [U, 2U] inside `window`: cubes of side U on a
/// lattice of stride U/2 (coarsened to stay under the cap), then seeded random
/// boxes. Each U gets its own generator so rows do not depend on the sweep.
inline std::vector<Region> sample_boxes(const Region& window, double U, std::size_t index,
                                        const DensityOptions& opt, std::size_t& lattice_count) {
  const Region bb = window.bounding_box();
  const int n = window.dimension();
  std::vector<Region> boxes;
  auto inside = [&](const Vec& lo, const Vec& side) {
    Vec hi(n);
    for (int a = 0; a < n; ++a) hi[a] = lo[a] + side[a];
    Region b = Region::box(lo, hi);
    return window.encloses(b) ? std::optional<Region>(b) : std::nullopt;
  };

  double stride = 0.5 * U;
  std::vector<std::int64_t> steps(n);
  for (;;) {
    double total = 1.0;
    for (int a = 0; a < n; ++a) {
      double room = bb.hi()[a] - bb.lo()[a] - U;
      steps[a] = room < 0 ? 0 : static_cast<std::int64_t>(std::floor(room / stride)) + 1;
      total *= static_cast<double>(steps[a]);
    }
    if (total <= static_cast<double>(opt.max_lattice_boxes)) break;
    stride *= 1.5;
  }
  if (std::all_of(steps.begin(), steps.end(), [](std::int64_t s) { return s > 0; })) {
    std::vector<std::int64_t> idx(n, 0);
    const Vec side(n, U);
    for (;;) {
      Vec lo(n);
      for (int a = 0; a < n; ++a) lo[a] = bb.lo()[a] + static_cast<double>(idx[a]) * stride;
      if (auto b = inside(lo, side)) boxes.push_back(*b);
      int a = 0;
      for (; a < n; ++a) {
        if (++idx[a] < steps[a]) break;
        idx[a] = 0;
      }
      if (a == n) break;
    }
  }
  lattice_count = boxes.size();

  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t accepted = 0;
  for (std::size_t attempt = 0; accepted < opt.random_boxes && attempt < 20 * opt.random_boxes; ++attempt) {
    Vec side(n), lo(n);
    bool fits = true;
    for (int a = 0; a < n; ++a) {
      side[a] = U * (1.0 + unit(rng));
      double room = bb.hi()[a] - bb.lo()[a] - side[a];
      if (room < 0) fits = false;
      lo[a] = bb.lo()[a] + std::max(room, 0.0) * unit(rng);
    }
    if (!fits) continue;
    if (auto b = inside(lo, side)) {
      boxes.push_back(*b);
      ++accepted;
    }
  }
  return boxes;
}

}  // namespace detail

/// Sampled upper, lower and median densities of w over squarish boxes of
/// every U. The extrema are taken over the sample only, so f_plus and
/// f_minus bracket the true sup/inf from the inside.
inline DensityProfile density_profile(const WeightDistribution& w, const Region& window,
                                      const std::vector<double>& U_list, const DensityOptions& opt = {}) {
  require(window.dimension() == w.dimension, ErrorKind::invalid_argument, "density profile: dimension mismatch");
  DensityProfile out;
  out.seed = opt.seed;
  for (std::size_t u = 0; u < U_list.size(); ++u) {
    const double U = U_list[u];
    require(U > w.U0, ErrorKind::invalid_argument, "box width U must exceed U0 of " + w.name);
    std::size_t lattice = 0;
    auto boxes = detail::sample_boxes(window, U, u, opt, lattice);
    require(boxes.size() >= opt.min_boxes, ErrorKind::insufficient_window,
            "window admits only " + std::to_string(boxes.size()) + " boxes at U = " + std::to_string(U));
    std::vector<std::vector<double>> dens(boxes.size());
    parallel_for(0, boxes.size(), [&](std::size_t b) {
      auto v = w.evaluate(boxes[b]);
      const double vol = boxes[b].volume();
      for (double& x : v) x /= vol;
      dens[b] = std::move(v);
    }, 16);

    DensityRow row{U, {}, {}, {}, {}, lattice, boxes.size() - lattice};
    for (std::size_t c = 0; c < w.components; ++c) {
      std::vector<double> col(boxes.size());
      for (std::size_t b = 0; b < boxes.size(); ++b) col[b] = dens[b][c];
      auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      row.f_plus.push_back(*hi);
      row.f_minus.push_back(*lo);
      row.delta.push_back(*hi - *lo);
      auto mid = col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2);
      std::nth_element(col.begin(), mid, col.end());
      row.f_zero.push_back(*mid);  // upper median; always one of the samples
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Worst |w(B)| / vol(B) over the given boxes, to compare with the declared bound.
inline double check_volume_bound(const WeightDistribution& w, const std::vector<Region>& boxes) {
  double worst = 0.0;
  for (const auto& b : boxes) {
    double norm2 = 0.0;
    for (double v : w.evaluate(b)) norm2 += v * v;
    worst = std::max(worst, std::sqrt(norm2) / b.volume());
  }
  return worst;
}

inline WeightDistribution weight_volume(int n) {
  WeightDistribution w;
  w.name = "volume";
  w.dimension = n;
  w.evaluate = [](const Region& b) { return std::vector<double>{b.volume()}; };
  return w;
}

namespace detail {

/// Box counting over a fixed point list: points sorted by first coordinate,
/// binary search on that axis, filter the rest.
class BoxCounter {
 public:
  BoxCounter(std::vector<double> pts, int dim, Region region) : dim_(dim), region_(std::move(region)) {
    const std::size_t m = pts.size() / dim;
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a * dim] < pts[b * dim]; });
    pts_.reserve(pts.size());
    for (std::size_t i : order) pts_.insert(pts_.end(), pts.begin() + i * dim, pts.begin() + (i + 1) * dim);
  }

  std::size_t count(const Region& box) const {
    require(region_.encloses(box), ErrorKind::window_incomplete, "box leaves the materialized window");
    const Region bb = box.bounding_box();
    auto first = [&](double x) {
      std::size_t lo = 0, hi = pts_.size() / dim_;
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (pts_[mid * dim_] < x) lo = mid + 1;
        else hi = mid;
      }
      return lo;
    };
    std::size_t c = 0;
    for (std::size_t i = first(bb.lo()[0]); i < pts_.size() / dim_ && pts_[i * dim_] <= bb.hi()[0]; ++i)
      c += box.contains({pts_.data() + i * dim_, static_cast<std::size_t>(dim_)});
    return c;
  }

 private:
  int dim_;
  Region region_;
  std::vector<double> pts_;
};

}  // namespace detail

/// w(B) = |X ∩ B| for a materialized window; boxes must lie inside it.
inline WeightDistribution weight_point_count(const ExactPointSet& set) {
  auto counter = std::make_shared<detail::BoxCounter>(set.points(), set.dimension(), set.region());
  WeightDistribution w;
  w.name = "point-count";
  w.dimension = set.dimension();
  // disjoint r-balls around the points fit in B grown by r, whose volume is
  // at most 2^n vol(B) once every side is at least 2r
  const int n = set.dimension();
  const double r = 0.5 * min_pair_distance(set.points(), n);
  w.U0 = 2.0 * r;
  w.volume_bound = std::pow(2.0, n) / (unit_ball_volume(n) * std::pow(r, n));
  w.evaluate = [counter](const Region& b) { return std::vector<double>{static_cast<double>(counter->count(b))}; };
  return w;
}

/// w(B) = number of white unit cells of the two-coloring whose lower corner
/// lies in B. Evaluated directly from the coloring, no window needed.
inline WeightDistribution weight_white_count(const TwoColorParams& params) {
  params.validate();
  WeightDistribution w;
  w.name = "white-count";
  w.dimension = params.n;
  w.evaluate = [params](const Region& b) {
    std::vector<std::int64_t> lo, hi;
    detail::integer_bounds(b, 0.0, lo, hi);
    double whites = 0;
    detail::for_each_lattice_point(lo, hi, [&](const IVec& x) {
      if (detail::contains_int(b, x)) whites += two_color_is_white(params, x);
    });
    return std::vector<double>{whites};
  };
  return w;
}

struct FrequencyEntry {
  Region region;
  std::size_t count;  // n_P(D)
  double frequency;   // n_P(D) / vol(D)
};

/// n_P(D) for a class found in a precomputed atlas; an absent key counts 0.
inline std::vector<FrequencyEntry> patch_frequency(const ExactPointSet& set, const AtlasResult& atlas,
                                                   const PatchKey& key, const std::vector<Region>& regions) {
  std::vector<FrequencyEntry> out;
  auto cls = atlas.find(key);
  for (const auto& D : regions) {
    require(atlas.certified_region.encloses(D), ErrorKind::window_too_small,
            "frequency region must lie in the certified region");
    std::size_t c = 0;
    if (cls)
      for (std::size_t i : atlas.classes[*cls].centers) c += D.contains(set.point(i));
    out.push_back({D, c, static_cast<double>(c) / D.volume()});
  }
  return out;
}

inline std::vector<FrequencyEntry> patch_frequency(const ExactPointSet& set, const PatchKey& key, double T,
                                                   const std::vector<Region>& regions) {
  return patch_frequency(set, compute_atlas(set, T), key, regions);
}

/// Keys of the T-classes whose centers are white points of the coded
/// two-coloring (address divisible by 3). Fails when some class mixes the two
/// colours, since then T is too small to read the colour off the patch.
inline std::vector<PatchKey> two_color_white_keys(const ExactPointSet& coded, const AtlasResult& atlas) {
  std::vector<PatchKey> keys;
  for (const auto& c : atlas.classes) {
    std::size_t whites = 0;
    for (std::size_t i : c.centers) {
      auto a = coded.address(i);
      whites += std::all_of(a.begin(), a.end(), [](std::int64_t v) { return v % 3 == 0; });
    }
    require(whites == 0 || whites == c.centers.size(), ErrorKind::degenerate_geometry,
            "a patch class mixes white and black points; raise T");
    if (whites) keys.push_back(c.key);
  }
  return keys;
}

struct OscillationRow {
  double scale;
  std::size_t count;
  double volume;
  double frequency;
  std::optional<Rational> rho;  // two-color reference at s = s_k
};

struct OscillationReport {
  std::vector<OscillationRow> rows;
  double oscillation = 0.0;  // max - min frequency over the upper half of the scales
  std::optional<double> floor;  // two-color: prod (1 - N/a_j) up to the deepest scale reached
  bool exceeds_floor = false;
};

/// Frequency of the union of `keys` in cubes of half-side s centred at
/// (c, ..., c) for each scale. One atlas on the largest window serves all
/// scales. For two-color sources the rows at s = s_k carry rho_k.
inline OscillationReport oscillation_probe(const PointSetSource& src, const std::vector<PatchKey>& keys, double T,
                                           const std::vector<double>& scales, double center = -0.5) {
  require(!scales.empty(), ErrorKind::invalid_argument, "oscillation probe needs scales");
  for (std::size_t i = 1; i < scales.size(); ++i)
    require(scales[i] > scales[i - 1], ErrorKind::invalid_argument, "scales must increase");
  const int n = src.dimension;
  const Vec c(n, center);
  auto set = src.materialize(Region::cube(c, scales.back() + T + 2.0 * src.covering_hint + 1.0));
  auto atlas = compute_atlas(set, T);

  std::optional<TwoColorParams> tc;
  std::optional<RhoSequence> rho;
  if (src.name == "two-color") {
    tc = TwoColorParams{src.params.at("n").get<int>(), src.params.at("a").get<std::vector<std::int64_t>>()};
    rho = rho_sequence(*tc, tc->a.size());
  }

  OscillationReport rep;
  std::size_t deepest = 0;
  for (double s : scales) {
    Region D = Region::cube(c, s);
    std::size_t count = 0;
    for (const auto& key : keys) count += patch_frequency(set, atlas, key, {D})[0].count;
    OscillationRow row{s, count, D.volume(), static_cast<double>(count) / D.volume(), std::nullopt};
    if (tc)
      for (std::size_t k = 1; k <= tc->a.size(); ++k)
        if (static_cast<double>(tc->scale(k)) == s) {
          row.rho = rho->recursion[k];
          deepest = std::max(deepest, k);
        }
    rep.rows.push_back(row);
  }
  const std::size_t half = rep.rows.size() / 2;
  double lo = rep.rows[half].frequency, hi = lo;
  for (std::size_t i = half; i < rep.rows.size(); ++i) {
    lo = std::min(lo, rep.rows[i].frequency);
    hi = std::max(hi, rep.rows[i].frequency);
  }
  rep.oscillation = hi - lo;
  if (tc && deepest > 0) {
    // consecutive rho differ by (P_k + P_{k+1}) / 2 >= P_{k+1}
    rep.floor = static_cast<double>(rho->product[deepest]);
    rep.exceeds_floor = rep.oscillation >= *rep.floor;
  }
  return rep;
}

}  // namespace delone
