#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "delone/spectral.hpp"
#include "delone/generators.hpp"

using namespace delone;

namespace {

ExactPointSet integers(double half) { return gen_integer_lattice(1).materialize(Region::box({-half}, {half})); }

// Brute-force pair count over -9..9 (the integers with |x| < 10).
std::map<std::int64_t, std::int64_t> z_pairs() {
  std::map<std::int64_t, std::int64_t> m;
  for (int a = -9; a <= 9; ++a)
    for (int b = -9; b <= 9; ++b) ++m[a - b];
  return m;
}

}  // namespace

TEST(Autocorrelation, IntegersAtTen) {
  auto ac = autocorrelation(integers(30.0), 10.0);
  EXPECT_EQ(ac.points, 19u);
  EXPECT_DOUBLE_EQ(ac.normalization, 20.0);
  auto oracle = z_pairs();
  ASSERT_EQ(ac.atoms.size(), oracle.size());
  for (const auto& atom : ac.atoms) {
    const std::int64_t m = atom.difference[0];
    EXPECT_EQ(atom.pairs, oracle[m]);
    EXPECT_EQ(atom.pairs, 19 - std::abs(m));
    EXPECT_EQ(atom.weight, static_cast<double>(19 - std::abs(m)) / 20.0);
  }
  EXPECT_EQ(ac.find({0})->weight, 0.95);
}

TEST(Autocorrelation, SinglePoint) {
  auto ac = autocorrelation(integers(5.0), 0.5);
  ASSERT_EQ(ac.atoms.size(), 1u);
  EXPECT_EQ(ac.atoms[0].difference, std::vector<std::int64_t>{0});
  EXPECT_EQ(ac.atoms[0].weight, 1.0);
}

TEST(Autocorrelation, SymmetricAndSupportedOnDifferences) {
  auto fib = gen_fibonacci().materialize(Region::box({-120.0}, {120.0}));
  auto ac = autocorrelation(fib, 60.0);
  for (const auto& atom : ac.atoms) {
    std::vector<std::int64_t> neg(atom.difference);
    for (auto& v : neg) v = -v;
    const Atom* mirror = ac.find(neg);
    ASSERT_NE(mirror, nullptr);
    EXPECT_EQ(mirror->weight, atom.weight);
    // x1 - x2 = difference for some pair of window points
    bool found = false;
    for (std::size_t i = 0; i < fib.size() && !found; ++i) {
      std::vector<std::int64_t> other(2);
      for (int k = 0; k < 2; ++k) other[k] = fib.address(i)[k] - atom.difference[k];
      found = fib.find(other).has_value();
    }
    EXPECT_TRUE(found);
  }
  EXPECT_GT(ac.find({0, 0})->weight, 0.0);
}

TEST(Autocorrelation, StrictInequality) {
  // 10 itself is excluded at T = 10 but included just above
  EXPECT_EQ(autocorrelation(integers(30.0), 10.0).points, 19u);
  EXPECT_EQ(autocorrelation(integers(30.0), 10.0 + 1e-9).points, 21u);
}

TEST(Autocorrelation, WeightsApproachOne) {
  auto z = integers(400.0);
  for (double T : {20.0, 50.5, 100.0, 333.3}) {
    auto ac = autocorrelation(z, T, std::nullopt, 12.0);
    for (std::int64_t m = -12; m <= 12; ++m)
      // the bound is attained for integer T, so allow rounding only
      EXPECT_LE(std::abs(ac.find({m})->weight - 1.0), (std::abs(m) + 1) / (2 * T) * (1 + 1e-12)) << T << " " << m;
  }
}

TEST(Autocorrelation, WindowTooSmall) {
  EXPECT_THROW(autocorrelation(integers(5.0), 10.0), Error);
  auto shifted = autocorrelation(integers(30.0), 10.0, Vec{0.5});
  EXPECT_EQ(shifted.points, 20u);
}

TEST(Diffraction, IntegerClosedForms) {
  auto ac = autocorrelation(integers(30.0), 10.0);
  auto spec = diffraction_estimate(ac, {{0.0}, {1.0}, {0.5}, {-0.5}});
  EXPECT_NEAR(spec.intensity[0], 18.05, 1e-9);
  EXPECT_NEAR(spec.intensity[1], 18.05, 1e-9);
  EXPECT_NEAR(spec.intensity[2], 0.05, 1e-9);
  EXPECT_EQ(spec.intensity[2], spec.intensity[3]);
  EXPECT_LT(spec.max_imaginary, imaginary_tolerance);
}

TEST(Diffraction, EvenInK) {
  auto fib = gen_fibonacci().materialize(Region::box({-100.0}, {100.0}));
  auto ac = autocorrelation(fib, 50.0);
  std::vector<Vec> grid;
  for (double k = 0.013; k < 3; k += 0.237) {
    grid.push_back({k});
    grid.push_back({-k});
  }
  auto spec = diffraction_estimate(ac, grid);
  for (std::size_t i = 0; i < grid.size(); i += 2) EXPECT_EQ(spec.intensity[i], spec.intensity[i + 1]);
}

TEST(Peaks, IntegerPeaks) {
  auto ac = autocorrelation(integers(30.0), 10.0);
  auto spec = diffraction_estimate(ac, line_grid(0.0, 3.0, 0.01));
  ASSERT_TRUE(spec.pitch.has_value());
  auto peaks = detect_peaks(spec, 0.5);
  ASSERT_EQ(peaks.size(), 4u);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(spec.grid[peaks[j]][0], j, 0.01);
}

TEST(Peaks, PlateauIsLeftmost) {
  SpectrumEstimate flat;
  flat.grid = line_grid(0.0, 1.0, 0.25);
  flat.intensity.assign(flat.grid.size(), 2.0);
  flat.pitch = 0.25;
  auto p = detect_peaks(flat, 0.5);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], 0u);

  SpectrumEstimate step = flat;
  step.intensity = {1.0, 3.0, 3.0, 3.0, 1.0};
  EXPECT_EQ(detect_peaks(step, 0.5), std::vector<std::size_t>{1});
}

TEST(Peaks, FibonacciStableUnderDoubling) {
  auto fib = gen_fibonacci().materialize(Region::box({-420.0}, {420.0}));
  // Bragg peaks have width ~ 1/(2T); a coarser grid aliases them
  const double pitch = 0.001;
  auto grid = line_grid(0.0, 2.0, pitch);
  auto a = detect_peaks(diffraction_estimate(autocorrelation(fib, 200.0), grid), 0.2);
  auto b = detect_peaks(diffraction_estimate(autocorrelation(fib, 400.0), grid), 0.2);
  ASSERT_GE(a.size(), 3u);
  EXPECT_EQ(a.size(), b.size());
  for (std::size_t i : a) {
    bool near = false;
    for (std::size_t j : b) near = near || std::abs(static_cast<double>(i) - static_cast<double>(j)) <= 2.0;
    EXPECT_TRUE(near) << grid[i][0];
  }
}
