#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "delone/repetitivity.hpp"

using namespace delone;

namespace {

ExactPointSet fib_window(double half) { return gen_fibonacci().materialize(Region::box({-half}, {half})); }

// Independent M for a 1D set: dense sampling of the evaluation interval,
// distance to the nearest known center of each class. Accurate to the pitch.
double sampled_M_1d(const ExactPointSet& s, const AtlasResult& atlas, double lo, double hi, double pitch) {
  double M = 0.0;
  for (const auto& c : atlas.classes) {
    std::vector<double> x;
    for (auto i : c.centers) x.push_back(s.point(i)[0]);
    std::sort(x.begin(), x.end());
    for (double t = lo; t <= hi; t += pitch) {
      auto it = std::lower_bound(x.begin(), x.end(), t);
      double d = 1e300;
      if (it != x.end()) d = *it - t;
      if (it != x.begin()) d = std::min(d, t - *(it - 1));
      M = std::max(M, d);
    }
  }
  return M;
}

// Largest half-gap between consecutive centers of one class.
double interior_M_1d(const ExactPointSet& s, const AtlasResult& atlas) {
  double M = 0.0;
  for (const auto& c : atlas.classes) {
    std::vector<double> x;
    for (auto i : c.centers) x.push_back(s.point(i)[0]);
    std::sort(x.begin(), x.end());
    for (std::size_t i = 1; i < x.size(); ++i) M = std::max(M, 0.5 * (x[i] - x[i - 1]));
  }
  return M;
}

}  // namespace

TEST(Repetitivity, IntegersHaveHalf) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-30.0}, {30.0}));
  for (double T : {1.0, 2.0, 5.0}) {
    auto r = repetitivity_function(z, T);
    EXPECT_DOUBLE_EQ(r.M_lower, 0.5);
    EXPECT_DOUBLE_EQ(r.M_upper, 0.5);
    EXPECT_TRUE(r.exact);
  }
  auto r2 = repetitivity_function(z, 2.0);
  auto p = repetitivity_prime(r2);
  EXPECT_DOUBLE_EQ(p.lower, 2.5);
  EXPECT_DOUBLE_EQ(p.upper, 2.5);
}

TEST(Repetitivity, FibonacciMatchesGapOracleAndCountingBound) {
  auto fib = fib_window(300.0);
  auto r = repetitivity_function(fib, 1.2);
  EXPECT_EQ(r.N_lower, 3u);
  const auto& ev = r.evaluation_region;
  EXPECT_NEAR(r.M_upper, sampled_M_1d(fib, r.atlas, ev.lo()[0], ev.hi()[0], 1e-3), 1e-3);
  EXPECT_DOUBLE_EQ(r.M_lower, interior_M_1d(fib, r.atlas));
  EXPECT_LE(r.M_lower, r.M_upper);
  EXPECT_GE(r.M_upper, counting_lower_bound(0.5, r.N_lower, 1));
  EXPECT_GE(r.M_upper, 1.0);
  auto p = repetitivity_prime(r);
  EXPECT_EQ(p.lower, r.M_lower + 1.2);
  EXPECT_EQ(p.upper, r.M_upper + 1.2);
}

TEST(Repetitivity, MonotoneInT) {
  auto fib = fib_window(400.0);
  const Region common = Region::box({-340.0}, {340.0});
  double prev = 0.0;
  for (double T = 0.7; T < 30; T *= 1.25) {
    auto r = repetitivity_function(fib, T, std::nullopt, common);
    EXPECT_GE(r.M_lower, prev - 1e-12) << T;
    prev = r.M_lower;
  }
}

TEST(Repetitivity, TwoDimensionalBracket) {
  auto z2 = gen_integer_lattice(2).materialize(Region::cube(2, 8.0));
  auto r = repetitivity_function(z2, 1.5);
  EXPECT_EQ(r.N_lower, 1u);
  EXPECT_LE(r.M_lower, std::sqrt(0.5) + 1e-12);
  EXPECT_GE(r.M_upper, std::sqrt(0.5));
  EXPECT_FALSE(r.exact);
}

TEST(CrystalProbe, IntegersAndFibonacci) {
  auto z = gen_integer_lattice(1).materialize(Region::box({-40.0}, {40.0}));
  auto dc = delone_constants(z);
  auto p3 = crystal_gap_probe(repetitivity_function(z, 3.0), dc);
  EXPECT_TRUE(p3.crystal_verdict);
  auto p10 = crystal_gap_probe(repetitivity_function(z, 10.0), dc);
  EXPECT_TRUE(p10.count_trigger);
  EXPECT_EQ(p10.floor_T_over_R, 20.0);

  auto fib = fib_window(600.0);
  auto fdc = delone_constants(fib);
  for (double T : {1.2, 2.5, 5.0, 10.0, 20.0}) {
    auto p = crystal_gap_probe(repetitivity_function(fib, T), fdc);
    EXPECT_FALSE(p.crystal_verdict) << T;
    EXPECT_FALSE(p.count_trigger) << T;
  }
}

TEST(Growth, IntegersAreCrystalLike) {
  WindowPolicy pol;
  pol.initial = 10.0;
  auto rep = growth_classification(gen_integer_lattice(1), {1.0, 2.0, 4.0, 8.0, 16.0}, pol);
  EXPECT_EQ(rep.linear, GrowthClass::ideal_crystal_like);
  EXPECT_NEAR(rep.slope_T, 0.0, 1e-12);
}

TEST(Growth, GoldenChainIsLinear) {
  auto rep = growth_classification(gen_fibonacci(), {1.0, 2.0, 4.0, 8.0, 16.0, 32.0});
  EXPECT_EQ(rep.linear, GrowthClass::empirically_linear);
  EXPECT_TRUE(rep.dense);
}

TEST(Growth, TauDoesNotChangeTheVerdict) {
  auto g = ContinuedFraction::golden();
  std::vector<double> Ts{1.0, 2.0, 4.0, 8.0, 16.0};
  auto a = growth_classification(gen_beatty(g, 1.5), Ts);
  auto b = growth_classification(gen_beatty(g, 1.9), Ts);
  EXPECT_EQ(a.linear, b.linear);
  EXPECT_EQ(a.dense, b.dense);
}

TEST(Growth, FastQuotientsAreNotLinear) {
  auto built = construct_alpha_for_growth([](const BigInt& t) { return Rational(t * t); }, 6);
  auto rep = symbolic_growth_classification(built.cf, {2, 4, 8, 16, 32, 64});
  EXPECT_EQ(rep.linear, GrowthClass::not_linear);
  auto golden = symbolic_growth_classification(ContinuedFraction::golden(), {2, 4, 8, 16, 32, 64});
  EXPECT_EQ(golden.linear, GrowthClass::empirically_linear);
}

TEST(Growth, NeedsEnoughSpan) {
  std::vector<GrowthSample> s{{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}};
  EXPECT_THROW(classify_growth(s, 1), Error);
  EXPECT_THROW(classify_growth({{1, 1, 1}}, 1), Error);
}

TEST(SymbolicOracle, Examples) {
  std::vector<int> alt;
  for (int i = 0; i < 100; ++i) alt.push_back(i % 2);
  EXPECT_EQ(symbolic_recurrence_oracle(alt, 1), 2);
  auto w = beatty_word(ContinuedFraction::golden(), 0, 500);
  EXPECT_EQ(symbolic_recurrence_oracle(w, 1), 3);
  EXPECT_EQ(symbolic_recurrence_oracle(w, 3), 8);
  std::vector<int> once{0, 0, 0, 1};
  EXPECT_FALSE(symbolic_recurrence_oracle(once, 1).has_value());
}

TEST(SymbolicOracle, AgreesWithRecurrenceFormula) {
  for (auto cf : {ContinuedFraction::periodic({1, 3, 5, 2, 4}), ContinuedFraction::periodic({5})}) {
    auto w = beatty_word(cf, 0, 50 * 40);
    for (std::size_t l = 1; l <= 40; ++l) {
      std::vector<int> prefix(w.begin(), w.begin() + 50 * l);
      auto got = symbolic_recurrence_oracle(prefix, l);
      ASSERT_TRUE(got.has_value());
      EXPECT_EQ(BigInt(*got), recurrence_formula(cf, static_cast<std::int64_t>(l))) << cf.label() << " " << l;
    }
  }
}

TEST(Complexity, SturmianCountsArePlusOne) {
  for (auto cf : {ContinuedFraction::golden(), ContinuedFraction::periodic({2})}) {
    for (std::size_t k = 1; k <= 12; ++k) {
      auto e = beatty_complexity(cf, k);
      EXPECT_TRUE(e.stabilized);
      EXPECT_EQ(e.count, k + 1);
    }
  }
  // a rational slope has bounded complexity
  EXPECT_EQ(beatty_complexity(ContinuedFraction::finite({2, 1}), 10).count, 3u);
}
