#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "delone/contfrac.hpp"
#include "delone/generators.hpp"

using namespace delone;

namespace {

// floor(m (sqrt5 - 1) / 2) by integer search: f is the largest integer with
// (2f + m)^2 <= 5 m^2 for m > 0.
std::int64_t golden_floor(std::int64_t m) {
  if (m == 0) return 0;
  auto ok = [m](std::int64_t f) {
    __int128 lhs = 2 * static_cast<__int128>(f) + m;
    if (m > 0) return lhs <= 0 || lhs * lhs <= 5 * static_cast<__int128>(m) * m;
    // m < 0: need 2f + m <= m sqrt5, i.e. -(2f+m) >= |m| sqrt5
    __int128 neg = -lhs;
    return neg >= 0 && neg * neg >= 5 * static_cast<__int128>(m) * m;
  };
  std::int64_t f = static_cast<std::int64_t>(m * 0.6180339887498949) - 2;
  while (ok(f + 1)) ++f;
  while (!ok(f)) --f;
  return f;
}

// Maximum gap between consecutive leftmost occurrences of every length-l
// factor, scanning the whole word; -1 when some factor is seen only once.
long brute_recurrence(const std::vector<int>& w, std::size_t l) {
  std::map<std::vector<int>, std::vector<std::size_t>> occ;
  for (std::size_t i = 0; i + l <= w.size(); ++i) occ[{w.begin() + i, w.begin() + i + l}].push_back(i);
  long best = 0;
  for (auto& [f, pos] : occ) {
    if (pos.size() < 2) return -1;
    for (std::size_t i = 1; i < pos.size(); ++i) best = std::max<long>(best, pos[i] - pos[i - 1]);
  }
  return best;
}

}  // namespace

TEST(Convergents, GoldenDenominators) {
  auto cv = convergents(ContinuedFraction::golden(), 4);
  std::vector<int> q;
  for (auto& c : cv) q.push_back(static_cast<int>(c.q));
  EXPECT_EQ(q, (std::vector<int>{1, 1, 2, 3, 5}));
}

TEST(Convergents, SingleQuotient) {
  auto c = ContinuedFraction::finite({2}).convergent(1);
  EXPECT_EQ(c.p, 1);
  EXPECT_EQ(c.q, 2);
}

TEST(Convergents, DeterminantIdentity) {
  auto cf = ContinuedFraction::periodic({3, 1, 4, 1, 5});
  for (std::size_t k = 1; k <= 20; ++k) {
    auto a = cf.convergent(k), b = cf.convergent(k - 1);
    BigInt det = a.p * b.q - b.p * a.q;
    EXPECT_EQ(det, (k % 2 == 1) ? 1 : -1) << "k=" << k;
  }
}

TEST(Convergents, DenominatorsStrictlyIncreaseFromTwo) {
  auto cf = ContinuedFraction::periodic({1, 2});
  for (std::size_t k = 2; k <= 30; ++k) EXPECT_LT(cf.convergent(k - 1).q, cf.convergent(k).q);
}

TEST(FloorMultiple, GoldenAgainstIntegerOracle) {
  auto cf = ContinuedFraction::golden();
  for (std::int64_t m = -3000; m <= 3000; ++m) ASSERT_EQ(cf.floor_multiple(m), golden_floor(m)) << m;
  for (std::int64_t m : {1000000007LL, 123456789012LL, -987654321098LL})
    EXPECT_EQ(cf.floor_multiple(m), golden_floor(m)) << m;
}

TEST(FloorMultiple, RationalIsExact) {
  auto half = ContinuedFraction::finite({2});
  EXPECT_EQ(half.floor_multiple(7), 3);
  EXPECT_EQ(half.floor_multiple(-7), -4);
  EXPECT_EQ(half.ceil_multiple(7), 4);
  EXPECT_EQ(half.ceil_multiple(8), 4);
}

TEST(RecurrenceFormula, GoldenValues) {
  auto g = ContinuedFraction::golden();
  EXPECT_EQ(recurrence_formula(g, 1), 3);
  EXPECT_EQ(recurrence_formula(g, 3), 8);
  // l = q_k exactly uses the left-closed bracket: q_4 = 5 gives q_4 + q_5 = 13
  EXPECT_EQ(recurrence_formula(g, 5), 13);
  EXPECT_EQ(recurrence_formula(g, 4), 8);
}

TEST(RecurrenceFormula, NondecreasingAndPiecewiseConstant) {
  auto cf = ContinuedFraction::periodic({2, 3});
  BigInt prev = 0;
  for (int l = 1; l <= 200; ++l) {
    BigInt v = recurrence_formula(cf, l);
    EXPECT_GE(v, prev);
    prev = v;
  }
  for (std::size_t k = 1; k <= 5; ++k) {
    auto q = cf.convergent(k).q, q1 = cf.convergent(k + 1).q;
    auto v = recurrence_formula(cf, static_cast<std::int64_t>(q));
    for (auto l = static_cast<std::int64_t>(q); l < static_cast<std::int64_t>(q1); ++l)
      EXPECT_EQ(recurrence_formula(cf, l), v);
  }
}

TEST(RecurrenceFormula, FiniteFractionRunsOut) {
  auto cf = ContinuedFraction::finite({1, 2});
  try {
    recurrence_formula(cf, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::needs_more_terms);
  }
}

TEST(RecurrenceFormula, MatchesWordScanOnSeveralAlphas) {
  for (auto cf : {ContinuedFraction::golden(), ContinuedFraction::periodic({2}), ContinuedFraction::periodic({1, 2}),
                  ContinuedFraction::periodic({3, 1, 4, 1, 5})}) {
    auto word = beatty_word(cf, 0, 50 * 24);
    for (int l = 1; l <= 24; ++l) {
      std::vector<int> prefix(word.begin(), word.begin() + 50 * l);
      EXPECT_EQ(recurrence_formula(cf, l), brute_recurrence(prefix, l)) << cf.label() << " l=" << l;
    }
  }
}

TEST(BadlyApproximable, Examples) {
  EXPECT_TRUE(is_badly_approximable(ContinuedFraction::golden(), 50, 1));
  EXPECT_FALSE(is_badly_approximable(ContinuedFraction::finite({1, 2, 50}), 3, 10));
  auto built = construct_alpha_for_growth([](const BigInt& t) { return Rational(t * t); }, 6);
  BigInt a2 = built.cf.quotient(2);
  EXPECT_FALSE(is_badly_approximable(built.cf, 6, a2 - 1));
  EXPECT_THROW(is_badly_approximable(ContinuedFraction::finite({1}), 3, 1), Error);
}

TEST(GrowthConstruction, LinearGrowth) {
  auto built = construct_alpha_for_growth([](const BigInt& t) { return Rational(t); }, 10);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_EQ(built.cf.quotient(k + 1), built.cf.convergent(k).q);
    EXPECT_TRUE(built.checks[k].exceeds());
    EXPECT_EQ(built.checks[k].recurrence, built.cf.convergent(k).q + built.cf.convergent(k + 1).q);
  }
}

TEST(GrowthConstruction, ConstantGrowthIsGolden) {
  auto built = construct_alpha_for_growth([](const BigInt&) { return Rational(1); }, 12);
  for (std::size_t k = 1; k <= 12; ++k) EXPECT_EQ(built.cf.quotient(k), 1);
}

TEST(GrowthConstruction, QuadraticGrowth) {
  auto built = construct_alpha_for_growth([](const BigInt& t) { return Rational(t * t); }, 8);
  const auto& c2 = built.checks[2];
  EXPECT_GT(Rational(c2.recurrence), Rational(c2.q_k * c2.q_k));
  for (const auto& c : built.checks) EXPECT_TRUE(c.exceeds());
}

TEST(GrowthConstruction, BudgetExceeded) {
  try {
    construct_alpha_for_growth([](const BigInt& t) { return Rational(t * t * t + 2); }, 40, 4096);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource_limit);
  }
}

TEST(ParseAlpha, Forms) {
  EXPECT_EQ(parse_alpha("golden").quotient(7), 1);
  auto p = parse_alpha("cf:1,2,...");
  EXPECT_FALSE(p.is_finite());
  EXPECT_EQ(p.quotient(4), 2);
  auto f = parse_alpha("cf:3,7");
  EXPECT_TRUE(f.is_finite());
  EXPECT_EQ(*f.length(), 2u);
  auto d = parse_alpha("0.6180339887498949");
  EXPECT_TRUE(d.is_finite());
  EXPECT_NEAR(d.value(), 0.6180339887498949, 1e-12);
  EXPECT_THROW(parse_alpha("cf:1,x"), Error);
  EXPECT_THROW(parse_alpha("1.5"), Error);
  EXPECT_THROW(parse_alpha("abc"), Error);
}

TEST(FromDecimal, SimpleRationals) {
  auto h = ContinuedFraction::from_decimal(0.5);
  EXPECT_EQ(*h.length(), 1u);
  EXPECT_EQ(h.quotient(1), 2);
  auto t = ContinuedFraction::from_decimal(0.375);  // 3/8 = [0;2,1,2]
  auto c = t.convergent(*t.length());
  EXPECT_EQ(c.p, 3);
  EXPECT_EQ(c.q, 8);
}
