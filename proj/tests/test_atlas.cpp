#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "delone/atlas.hpp"

using namespace delone;

namespace {

using Offsets = std::set<std::vector<long>>;

// Brute-force translation classes of an integer point set given as a set of
// coordinates; patch = offsets v with |v|^2 <= T2 (or |v|_inf <= half for cubes).
std::size_t brute_classes(const std::set<std::vector<long>>& pts, const std::vector<std::vector<long>>& centers,
                          long reach, bool cube, double T2, double half) {
  std::set<Offsets> classes;
  for (const auto& c : centers) {
    Offsets o;
    const int n = static_cast<int>(c.size());
    std::vector<long> v(n, -reach);
    while (true) {
      double n2 = 0, sup = 0;
      for (long x : v) n2 += double(x) * x, sup = std::max(sup, std::abs(double(x)));
      bool in = cube ? sup <= half : n2 <= T2;
      std::vector<long> p(n);
      for (int a = 0; a < n; ++a) p[a] = c[a] + v[a];
      if (in && pts.contains(p)) o.insert(v);
      int a = 0;
      for (; a < n; ++a) {
        if (++v[a] <= reach) break;
        v[a] = -reach;
      }
      if (a == n) break;
    }
    classes.insert(o);
  }
  return classes.size();
}

ExactPointSet z2_minus_origin(double half) {
  return gen_integer_lattice(2, {{0, 0}}).materialize(Region::cube(2, half));
}

}  // namespace

TEST(Atlas, IntegersHaveOneClass) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-20.0}, {20.0}));
  for (double T : {0.5, 1.0, 2.7, 5.0}) EXPECT_EQ(compute_atlas(z, T).count(), 1u) << T;
  EXPECT_EQ(cubical_atlas(z, 2.5).count(), 1u);
}

TEST(Atlas, FibonacciNearestNeighbourPatches) {
  auto fib = gen_fibonacci().materialize(Region::box({-200.0}, {200.0}));
  auto atlas = compute_atlas(fib, 1.2);
  // oracle: the (left gap, right gap) pairs in the golden word
  auto w = beatty_word(ContinuedFraction::golden(), -150, 300);
  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 1; i < w.size(); ++i) pairs.insert({w[i - 1], w[i]});
  EXPECT_EQ(atlas.count(), pairs.size());
  EXPECT_EQ(atlas.count(), 3u);
  EXPECT_FALSE(atlas.flagged());
}

TEST(Atlas, PuncturedSquareLatticeMatchesBruteForce) {
  auto set = z2_minus_origin(10.0);
  auto atlas = compute_atlas(set, 1.0);
  std::set<std::vector<long>> pts;
  std::vector<std::vector<long>> centers;
  for (long x = -10; x <= 10; ++x)
    for (long y = -10; y <= 10; ++y) {
      if (x == 0 && y == 0) continue;
      pts.insert({x, y});
      if (std::abs(x) <= 9 && std::abs(y) <= 9) centers.push_back({x, y});
    }
  EXPECT_EQ(atlas.center_count(), centers.size());
  EXPECT_EQ(centers.size(), 360u);
  EXPECT_EQ(atlas.count(), brute_classes(pts, centers, 1, false, 1.0, 0.0));
  EXPECT_EQ(atlas.count(), 5u);
}

TEST(Atlas, CubicalPuncturedLatticeMatchesBruteForce) {
  auto set = z2_minus_origin(10.0);
  auto atlas = cubical_atlas(set, 2.0);
  std::set<std::vector<long>> pts;
  std::vector<std::vector<long>> centers;
  for (long x = -10; x <= 10; ++x)
    for (long y = -10; y <= 10; ++y) {
      if (x == 0 && y == 0) continue;
      pts.insert({x, y});
      if (std::abs(x) <= 9 && std::abs(y) <= 9) centers.push_back({x, y});
    }
  EXPECT_EQ(atlas.count(), brute_classes(pts, centers, 1, true, 0.0, 1.0));
  EXPECT_EQ(atlas.count(), 9u);
}

TEST(Atlas, CountIsMonotoneInT) {
  auto fib = gen_fibonacci().materialize(Region::box({-300.0}, {300.0}));
  std::size_t prev = 0;
  for (double T = 0.5; T <= 12.0; T += 0.37) {
    std::size_t n = compute_atlas(fib, T).count();
    EXPECT_GE(n, prev) << T;
    prev = n;
  }
}

TEST(Atlas, TranslationInvariantKeys) {
  auto fib = gen_fibonacci().materialize(Region::box({-100.0}, {100.0}));
  std::vector<std::int64_t> shifted = fib.addresses();
  for (std::size_t i = 0; i < shifted.size(); i += 2) shifted[i] += 7, shifted[i + 1] += 3;
  const double tau = std::numbers::phi, off = 7 + 3 * tau;
  ExactPointSet moved(1, 2, fib.projection(), shifted, Region::box({-100.0 + off}, {100.0 + off}));
  auto a = compute_atlas(fib, 4.3), b = compute_atlas(moved, 4.3);
  ASSERT_EQ(a.count(), b.count());
  for (std::size_t c = 0; c < a.count(); ++c) {
    EXPECT_EQ(a.classes[c].key, b.classes[c].key);
    // window edges move with the shift, so allow one center of slack per side
    EXPECT_NEAR(double(a.classes[c].centers.size()), double(b.classes[c].centers.size()), 2.0);
  }
}

TEST(Atlas, WindowTooSmall) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-1.0}, {1.0}));
  try {
    compute_atlas(z, 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::window_too_small);
  }
}

TEST(Atlas, CubicalEqualsHalfRadiusBallInOneDimension) {
  std::vector<ExactPointSet> sets{gen_fibonacci().materialize(Region::box({-150.0}, {150.0})),
                                  gen_cut_project_1d(ContinuedFraction::periodic({1, 2})).materialize(
                                      Region::box({-150.0}, {150.0})),
                                  gen_two_color({1, {16, 32}}).materialize(Region::box({-150.0}, {150.0}))};
  for (const auto& s : sets)
    for (double T : {0.9, 2.0, 3.3, 6.1, 10.0}) {
      auto cube = cubical_atlas(s, T), ball = compute_atlas(s, T / 2);
      EXPECT_EQ(cube.count(), ball.count());
      EXPECT_EQ(cube.center_count(), ball.center_count());
    }
}

TEST(Atlas, BoundaryTiesAreFlaggedForIrrationalProjections) {
  auto fib = gen_fibonacci().materialize(Region::box({-50.0}, {50.0}));
  auto atlas = compute_atlas(fib, std::numbers::phi);  // exactly one long gap
  EXPECT_TRUE(atlas.flagged());
  auto z = gen_integer_lattice(1).materialize(Region::box({-10.0}, {10.0}));
  EXPECT_FALSE(compute_atlas(z, 2.0).flagged());  // integer ties are decided exactly
  EXPECT_EQ(compute_atlas(z, 2.0).classes[0].key.size(), 5u);
}

TEST(Atlas, DeletedLinesLevelOneBound) {
  auto src = gen_deleted_lines({4});
  auto set = src.materialize(Region::cube(3, 20.0));
  for (int T = 1; T <= 2; ++T) EXPECT_LE(compute_atlas(set, T).count(), std::size_t(12 * T * T));
}

TEST(Profile, LatticeStabilises) {
  WindowPolicy pol;
  pol.initial = 6.0;
  auto prof = patch_count_profile(gen_integer_lattice(2), {1.0, 2.0, 3.0}, pol);
  for (const auto& e : prof) {
    EXPECT_EQ(e.N_lower, 1u);
    EXPECT_TRUE(e.stabilized);
  }
}

TEST(Profile, FibonacciIsNondecreasingStepFunction) {
  std::vector<double> Ts;
  for (double T = 0.6; T < 15; T *= 1.3) Ts.push_back(T);
  auto prof = patch_count_profile(gen_fibonacci(), Ts);
  std::size_t prev = 0;
  for (const auto& e : prof) {
    EXPECT_TRUE(e.stabilized);
    EXPECT_GE(e.N_lower, prev);
    prev = e.N_lower;
  }
  auto ent = entropy_probe(prof, 1);
  ASSERT_EQ(ent.points.size(), prof.size());
  // N grows linearly, so log N / T falls once T is past a few tile lengths
  for (std::size_t i = 1; i < ent.points.size(); ++i) {
    if (ent.points[i - 1].T >= 3.0) {
      EXPECT_LE(ent.points[i].normalized_log_count, ent.points[i - 1].normalized_log_count + 1e-12);
    }
  }
  EXPECT_LT(ent.points.back().normalized_log_count, 0.5 * ent.c0);
  for (std::size_t i = 0; i < ent.points.size(); ++i)
    EXPECT_LE(std::log(double(prof[i].N_lower)), ent.c0 * prof[i].T + 1e-12);
}

TEST(Profile, DeletedLinesAtTwo) {
  WindowPolicy pol;
  pol.initial = 12.0;
  pol.max_doublings = 1;
  auto prof = patch_count_profile(gen_deleted_lines({4}), {2.0}, pol);
  EXPECT_LE(prof[0].N_lower, 48u);
}

TEST(Profile, ZeroEntropyForLattices) {
  WindowPolicy pol;
  pol.initial = 5.0;
  auto ent = entropy_probe(patch_count_profile(gen_integer_lattice(1), {1.0, 2.0}, pol), 1);
  for (const auto& p : ent.points) EXPECT_EQ(p.normalized_log_count, 0.0);
}

TEST(FloatAtlas, MatchesExactOnIntegers) {
  auto set = z2_minus_origin(8.0);
  auto fa = compute_atlas(to_float_set(set, 1e-6), 1.5);
  EXPECT_TRUE(fa.approximate);
  EXPECT_EQ(fa.count(), compute_atlas(set, 1.5).count());
}
