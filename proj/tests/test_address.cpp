#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "delone/address.hpp"
#include "delone/generators.hpp"

using namespace delone;

namespace {

ExactPointSet chain(double half) { return gen_fibonacci().materialize(Region::box({-half}, {half})); }

// Index of the lattice spanned by the rows, as the gcd of all s x s minors
// (Cramer-style expansion, independent of the Hermite reduction).
std::int64_t det(std::vector<std::vector<std::int64_t>> m) {
  const std::size_t s = m.size();
  if (s == 1) return m[0][0];
  std::int64_t total = 0;
  for (std::size_t c = 0; c < s; ++c) {
    std::vector<std::vector<std::int64_t>> minor;
    for (std::size_t r = 1; r < s; ++r) {
      std::vector<std::int64_t> row;
      for (std::size_t k = 0; k < s; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    total += (c % 2 ? -1 : 1) * m[0][c] * det(minor);
  }
  return total;
}

std::int64_t minor_gcd(const std::vector<std::vector<std::int64_t>>& rows, std::size_t s) {
  std::int64_t g = 0;
  std::vector<std::size_t> pick(s);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth == s) {
      std::vector<std::vector<std::int64_t>> m;
      for (std::size_t i : pick) m.push_back(rows[i]);
      g = std::gcd(g, std::abs(det(m)));
      return;
    }
    for (std::size_t i = from; i < rows.size(); ++i) {
      pick[depth] = i;
      rec(depth + 1, i + 1);
    }
  };
  rec(0, 0);
  return g;
}

}  // namespace

TEST(AddressMap, IntegerLatticeIsItself) {
  auto z2 = gen_integer_lattice(2).materialize(Region::cube(2, 4.0));
  auto m = build_address_map(z2);
  EXPECT_EQ(m.rank(), 2);
  EXPECT_EQ(m.rank_of_points(), 2);
  EXPECT_EQ(m.basis(), (std::vector<std::vector<std::int64_t>>{{1, 0}, {0, 1}}));
  EXPECT_EQ(*m.index(), 1);
  EXPECT_EQ(z2.point(m.reference())[0], 0.0);
  EXPECT_TRUE(m.warnings().empty());
}

TEST(AddressMap, EvenIntegersHaveIndexTwo) {
  std::vector<std::int64_t> addr;
  for (std::int64_t k = -10; k <= 10; ++k) addr.push_back(2 * k);
  ExactPointSet evens(1, 1, {1.0}, addr, Region::box({-20.0}, {20.0}));
  auto m = build_address_map(evens);
  EXPECT_EQ(m.basis(), (std::vector<std::vector<std::int64_t>>{{2}}));
  EXPECT_EQ(*m.index(), 2);
  EXPECT_EQ(m.phi(evens, evens.size() - 1), std::vector<std::int64_t>{10});
  EXPECT_THROW(m.coordinates(std::vector<std::int64_t>{3}), Error);
}

TEST(AddressMap, IndexMatchesMinorGcd) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> coef(-9, 9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t s = 2 + trial % 2;
    std::set<std::vector<std::int64_t>> uniq;
    while (uniq.size() < 6) {
      std::vector<std::int64_t> v(s);
      for (auto& x : v) x = coef(rng);
      uniq.insert(v);
    }
    std::vector<std::int64_t> flat;
    std::vector<std::vector<std::int64_t>> diffs;
    const std::vector<std::int64_t> base = *uniq.begin();
    for (const auto& v : uniq) {
      flat.insert(flat.end(), v.begin(), v.end());
      std::vector<std::int64_t> d(s);
      for (std::size_t k = 0; k < s; ++k) d[k] = v[k] - base[k];
      diffs.push_back(d);
    }
    std::vector<double> proj{1.0, std::sqrt(2.0), std::sqrt(3.0)};
    proj.resize(s);
    ExactPointSet set(1, static_cast<int>(s), proj, flat, Region::box({-100.0}, {100.0}));
    const std::int64_t oracle = minor_gcd(diffs, s);
    if (oracle == 0) continue;  // rank deficient draw
    auto m = build_address_map(set, 0);
    ASSERT_EQ(m.rank(), static_cast<int>(s));
    EXPECT_EQ(*m.index(), oracle) << trial;
    // every difference has integral coordinates and phi is additive
    for (std::size_t i = 0; i < set.size(); ++i)
      for (std::size_t j = 0; j < set.size(); ++j) {
        auto pi = m.phi(set, i), pj = m.phi(set, j);
        std::vector<std::int64_t> d(s);
        for (std::size_t k = 0; k < s; ++k) d[k] = set.address(i)[k] - set.address(j)[k];
        auto c = m.coordinates(d);
        for (std::size_t k = 0; k < s; ++k) EXPECT_EQ(c[k], pi[k] - pj[k]);
      }
  }
}

TEST(AddressMap, FibonacciRankTwo) {
  auto fib = chain(100.0);
  auto m = build_address_map(fib);
  EXPECT_EQ(m.rank(), 2);
  EXPECT_EQ(*m.index(), 1);
  EXPECT_TRUE(m.degeneracy_checked());
  EXPECT_FALSE(m.degeneracy().has_value());
  EXPECT_EQ(m.phi(fib, m.reference()), (std::vector<std::int64_t>{0, 0}));
}

TEST(AddressMap, RationalSlopeIsFlagged) {
  // slope 1/2: the strip picks (m, ceil(m/2)) and pi(1, -2) = 0
  std::vector<std::int64_t> addr;
  for (std::int64_t m = -40; m <= 40; ++m) {
    addr.push_back(m);
    addr.push_back(m >= 0 ? (m + 1) / 2 : -((-m) / 2));
  }
  ExactPointSet set(1, 2, {1.0, 0.5}, addr, Region::box({-60.0}, {60.0}));
  auto m = build_address_map(set);
  EXPECT_EQ(m.rank(), 2);
  ASSERT_TRUE(m.degeneracy().has_value());
  EXPECT_EQ(*m.degeneracy(), (std::vector<std::int64_t>{1, -2}));
  EXPECT_FALSE(m.warnings().empty());
}

TEST(AddressMap, TooFewPoints) {
  ExactPointSet one(1, 1, {1.0}, {0}, Region::box({-1.0}, {1.0}));
  EXPECT_THROW(build_address_map(one), Error);
}

TEST(Lipschitz, IntegersAreOne) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-50.0}, {50.0}));
  auto est = lipschitz_constant(z, build_address_map(z));
  EXPECT_TRUE(est.exhaustive);
  EXPECT_EQ(est.value, 1.0);
}

TEST(Lipschitz, FibonacciStableUnderDoubling) {
  auto small = chain(200.0), big = chain(400.0);
  auto a = lipschitz_constant(small, build_address_map(small));
  auto b = lipschitz_constant(big, build_address_map(big));
  EXPECT_NEAR(b.value / a.value, 1.0, 0.05);
  auto huge = chain(7200.0);
  ASSERT_GT(huge.size(), 10000u);
  auto c = lipschitz_constant(huge, build_address_map(huge), 3, 200000);
  EXPECT_FALSE(c.exhaustive);
  EXPECT_NEAR(c.value / b.value, 1.0, 0.05);
}

TEST(LinearFit, IntegersFitExactly) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-300.0}, {300.0}));
  auto fit = linear_fit(z, build_address_map(z));
  EXPECT_TRUE(fit.identically_zero);
  EXPECT_NEAR(fit.L(0, 0), 1.0, 1e-12);
  EXPECT_FALSE(fit.exponent.has_value());
  auto v = meyer_residual(fit);
  EXPECT_TRUE(v.bounded);
}

TEST(LinearFit, FibonacciResidualIsBounded) {
  auto fib = chain(4000.0);
  auto map = build_address_map(fib);
  auto fit = linear_fit(fib, map);
  EXPECT_LT(fit.pi_L_error, 1e-9);
  EXPECT_FALSE(fit.identically_zero);
  ASSERT_TRUE(fit.exponent.has_value());
  EXPECT_LE(std::abs(*fit.exponent), 0.1);
  auto v = meyer_residual(fit);
  EXPECT_TRUE(v.enough_annuli);
  EXPECT_TRUE(v.bounded) << v.late_variation;
  // L maps a unit of length to the expected counts of each gap
  const double longg = 1.0 / std::numbers::phi, unit = 1.0 - longg;  // symbol frequencies
  const double mean = unit + longg * std::numbers::phi;
  EXPECT_NEAR(fit.L(0, 0), unit / mean, 1e-3);
  EXPECT_NEAR(fit.L(1, 0), longg / mean, 1e-3);
}

TEST(LinearFit, ProductPlane) {
  auto fib = gen_fibonacci();
  auto set = gen_product({fib, fib}).materialize(Region::cube(2, 40.0));
  auto map = build_address_map(set);
  EXPECT_EQ(map.rank(), 4);
  auto fit = linear_fit(set, map);
  EXPECT_LT(fit.pi_L_error, 1e-9);
}

TEST(PathDisplacement, IntegerRounding) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-30.0}, {30.0}));
  auto w = path_displacement_distribution(z, build_address_map(z), 1);
  EXPECT_EQ(w.evaluate(Region::box({0.2}, {5.7})), std::vector<double>{6.0});
  // ties go to the lower address
  EXPECT_EQ(w.evaluate(Region::box({0.5}, {3.5})), std::vector<double>{3.0});
}

TEST(PathDisplacement, BoundaryWeightsInThePlane) {
  auto z2 = gen_integer_lattice(2).materialize(Region::cube(2, 20.0));
  auto w = path_displacement_distribution(z2, build_address_map(z2), 1);
  // g in {0, 1, 2, 3} with weights 1/2, 1, 1, 1/2; each path moves 5 in x
  EXPECT_EQ(w.evaluate(Region::box({0.2, 0.0}, {5.2, 3.0})), (std::vector<double>{15.0, 0.0}));
  auto w2 = path_displacement_distribution(z2, build_address_map(z2), 2);
  EXPECT_EQ(w2.evaluate(Region::box({0.5, 1.0}, {2.5, 4.0})), (std::vector<double>{0.0, 6.0}));
}

TEST(PathDisplacement, WindowIncomplete) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-10.0}, {10.0}));
  auto w = path_displacement_distribution(z, build_address_map(z), 1);
  try {
    w.evaluate(Region::box({0.0}, {12.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::window_incomplete);
  }
}

TEST(PathDisplacement, AgreesWithLinearFit) {
  auto fib = chain(6950.0);
  ASSERT_GE(fib.size(), 10000u);
  auto map = build_address_map(fib);
  auto fit = linear_fit(fib, map);
  auto w = path_displacement_distribution(fib, map, 1);
  auto profile = density_profile(w, *fib.region().eroded(5.0), {100.0, 400.0, 1600.0});
  const auto& last = profile.rows.back();
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(last.f_zero[k] / fit.L(k, 0), 1.0, 0.02) << k;
}

TEST(PathDisplacement, OutlivesTheSet) {
  WeightDistribution w;
  {
    auto z = gen_integer_lattice(1).materialize(Region::box({-30.0}, {30.0}));
    w = path_displacement_distribution(z, build_address_map(z), 1);
  }
  EXPECT_EQ(w.evaluate(Region::box({-4.2}, {7.9})), std::vector<double>{12.0});
}
