#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "delone/contfrac.hpp"
#include "delone/ergodic.hpp"
#include "delone/error.hpp"
#include "delone/point_set.hpp"
#include "delone/spatial.hpp"

namespace delone {

namespace detail {

/// Row-style Hermite normal form over Z, built one generator at a time.
/// Rows are kept in echelon form with positive pivots; entries above each
/// pivot are reduced into [0, pivot) by `finish`.
class HermiteBasis {
 public:
  explicit HermiteBasis(int width) : width_(width) {}

  void insert(std::vector<BigInt> v) {
    for (std::size_t r = 0; r <= rows_.size(); ++r) {
      int lead = leading(v);
      if (lead < 0) return;
      if (r == rows_.size() || pivot(rows_[r]) > lead) {
        if (v[lead] < 0)
          for (auto& x : v) x = -x;
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(r), std::move(v));
        return;
      }
      if (pivot(rows_[r]) < lead) continue;
      // same pivot column: replace the row by the gcd combination, keep the remainder
      auto& b = rows_[r];
      BigInt g, x, y;
      ext_gcd(b[lead], v[lead], g, x, y);
      const BigInt bl = b[lead] / g, vl = v[lead] / g;
      std::vector<BigInt> row(width_), rest(width_);
      for (int k = 0; k < width_; ++k) {
        row[k] = x * b[k] + y * v[k];
        rest[k] = bl * v[k] - vl * b[k];
      }
      if (row[lead] < 0)
        for (auto& e : row) e = -e;
      b = std::move(row);
      v = std::move(rest);
    }
  }

  void finish() {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const int p = pivot(rows_[r]);
      for (std::size_t u = 0; u < r; ++u) {
        BigInt q = floor_div(rows_[u][p], rows_[r][p]);
        if (q != 0)
          for (int k = 0; k < width_; ++k) rows_[u][k] -= q * rows_[r][k];
      }
    }
  }

  const std::vector<std::vector<BigInt>>& rows() const { return rows_; }
  static int pivot(const std::vector<BigInt>& v) { return leading(v); }

 private:
  static int leading(const std::vector<BigInt>& v) {
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] != 0) return static_cast<int>(k);
    return -1;
  }

  static void ext_gcd(const BigInt& a, const BigInt& b, BigInt& g, BigInt& x, BigInt& y) {
    BigInt r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
      BigInt q = r0 / r1;
      BigInt tmp = r0 - q * r1;
      r0 = r1, r1 = tmp;
      tmp = s0 - q * s1;
      s0 = s1, s1 = tmp;
      tmp = t0 - q * t1;
      t0 = t1, t1 = tmp;
    }
    if (r0 < 0) r0 = -r0, s0 = -s0, t0 = -t0;
    g = r0, x = s0, y = t0;
  }

  int width_;
  std::vector<std::vector<BigInt>> rows_;
};

inline std::vector<std::vector<std::int64_t>> hermite_rows(const std::vector<std::int64_t>& flat, int width,
                                                           std::size_t skip_row = static_cast<std::size_t>(-1)) {
  HermiteBasis h(width);
  const std::size_t m = flat.size() / width;
  const std::int64_t* base = skip_row < m ? flat.data() + skip_row * width : nullptr;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<BigInt> v(width);
    for (int k = 0; k < width; ++k) v[k] = BigInt(flat[i * width + k]) - (base ? BigInt(base[k]) : BigInt(0));
    h.insert(std::move(v));
  }
  h.finish();
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& row : h.rows()) {
    std::vector<std::int64_t> r(width);
    for (int k = 0; k < width; ++k) r[k] = static_cast<std::int64_t>(row[k]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

/// Coordinates on the group generated by X - X. The reference point x0 (the
/// point nearest the origin, lowest address on ties) plays the role of 0, so
/// phi(x) = coordinates of a(x) - a(x0) in the Hermite basis of the
/// difference lattice.
class AddressMap {
 public:
  int rank() const { return static_cast<int>(basis_.size()); }        // rank of [X - X]
  int rank_of_points() const { return rank_points_; }                 // rank of the group of addresses
  int ambient_rank() const { return ambient_; }                       // s of the input addresses
  int dimension() const { return dim_; }
  std::size_t reference() const { return reference_; }
  const std::vector<std::vector<std::int64_t>>& basis() const { return basis_; }

  /// |det| of the basis when it is square: the index of [X - X] in Z^s.
  std::optional<BigInt> index() const {
    if (rank() != ambient_) return std::nullopt;
    BigInt d = 1;
    for (int r = 0; r < rank(); ++r) d *= basis_[r][r];
    return d;
  }

  /// Coordinates of an address difference; throws if it is not in the lattice.
  std::vector<std::int64_t> coordinates(std::span<const std::int64_t> diff) const {
    std::vector<BigInt> d(diff.begin(), diff.end());
    std::vector<std::int64_t> c(basis_.size());
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      const int p = detail::HermiteBasis::pivot(to_big(basis_[r]));
      const BigInt piv = basis_[r][p];
      require(d[p] % piv == 0, ErrorKind::invalid_argument, "address difference outside the difference lattice");
      BigInt q = d[p] / piv;
      c[r] = static_cast<std::int64_t>(q);
      for (int k = 0; k < ambient_; ++k) d[k] -= q * basis_[r][k];
    }
    for (const auto& v : d)
      require(v == 0, ErrorKind::invalid_argument, "address difference outside the difference lattice");
    return c;
  }

  /// phi(x) for a point of the analysed set.
  std::vector<std::int64_t> phi(const ExactPointSet& set, std::size_t i) const {
    std::vector<std::int64_t> d(ambient_);
    for (int k = 0; k < ambient_; ++k) d[k] = set.address(i)[k] - set.address(reference_)[k];
    return coordinates(d);
  }

  /// n x rank matrix whose column j is pi of basis vector j.
  const Eigen::MatrixXd& projection() const { return proj_; }

  /// Smallest-height integer relation among the projected basis vectors, if
  /// one with entries up to the search height exists. A relation means pi is
  /// not injective on the lattice.
  const std::optional<std::vector<std::int64_t>>& degeneracy() const { return relation_; }
  bool degeneracy_checked() const { return relation_checked_; }
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (relation_) w.push_back("projection is not injective on the difference lattice (integer relation found)");
    if (rank_points_ != rank()) w.push_back("rank of X and rank of X - X differ on this window");
    return w;
  }

  friend AddressMap build_address_map(const ExactPointSet& set, int relation_height);

 private:
  static std::vector<BigInt> to_big(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

  int dim_ = 1, ambient_ = 1, rank_points_ = 0;
  std::size_t reference_ = 0;
  std::vector<std::vector<std::int64_t>> basis_;
  Eigen::MatrixXd proj_;
  std::optional<std::vector<std::int64_t>> relation_;
  bool relation_checked_ = false;
};

inline AddressMap build_address_map(const ExactPointSet& set, int relation_height = 12) {
  require(set.size() >= 2, ErrorKind::insufficient_data, "address map needs at least two points");
  const int n = set.dimension(), s = set.rank();
  AddressMap m;
  m.dim_ = n;
  m.ambient_ = s;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    double d2 = 0.0;
    for (double v : set.point(i)) d2 += v * v;
    if (d2 < best) best = d2, m.reference_ = i;
  }
  m.basis_ = detail::hermite_rows(set.addresses(), s, m.reference_);
  m.rank_points_ = static_cast<int>(detail::hermite_rows(set.addresses(), s).size());
  require(m.rank() >= n, ErrorKind::insufficient_data, "differences do not span; window too small");

  const int r = m.rank();
  m.proj_ = Eigen::MatrixXd(n, r);
  for (int j = 0; j < r; ++j) {
    Vec p = set.project(m.basis_[j]);
    for (int a = 0; a < n; ++a) m.proj_(a, j) = p[a];
  }
  // Integer relation search: enumerate coefficient vectors up to the height,
  // first nonzero entry positive. Only attempted while the box stays small.
  const double combos = std::pow(2.0 * relation_height + 1.0, r);
  if (r > n && combos <= 5e6) {
    m.relation_checked_ = true;
    const double scale = m.proj_.cwiseAbs().maxCoeff();
    std::vector<std::int64_t> c(r, -relation_height);
    std::optional<std::vector<std::int64_t>> found;
    std::int64_t found_height = relation_height + 1;
    while (true) {
      std::int64_t h = 0;
      int first = -1;
      for (int j = 0; j < r; ++j) {
        h = std::max<std::int64_t>(h, std::abs(c[j]));
        if (first < 0 && c[j] != 0) first = j;
      }
      if (first >= 0 && c[first] > 0 && h < found_height) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < r; ++j) v += static_cast<double>(c[j]) * m.proj_.col(j);
        if (v.norm() <= 1e-9 * std::max(1.0, scale * static_cast<double>(h))) found = c, found_height = h;
      }
      int j = 0;
      for (; j < r; ++j) {
        if (++c[j] <= relation_height) break;
        c[j] = -relation_height;
      }
      if (j == r) break;
    }
    m.relation_ = found;
  }
  return m;
}

/// Empirical Lipschitz ratio max |phi(x1) - phi(x2)| / |x1 - x2|: all pairs
/// below 10^4 points, otherwise `samples` seeded random pairs plus every pair
/// within 2R of each other. A lower bound on the true constant.
struct LipschitzEstimate {
  double value = 0.0;
  std::size_t pairs = 0;
  bool exhaustive = false;
};

inline LipschitzEstimate lipschitz_constant(const ExactPointSet& set, const AddressMap& map, std::uint64_t seed = 0,
                                            std::size_t samples = 1000000) {
  require(set.size() >= 2, ErrorKind::insufficient_data, "Lipschitz ratio needs two points");
  const std::size_t m = set.size();
  const int n = set.dimension();
  std::vector<std::vector<double>> phis(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto c = map.phi(set, i);
    phis[i].assign(c.begin(), c.end());
  }
  LipschitzEstimate est;
  auto ratio = [&](std::size_t i, std::size_t j) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < phis[i].size(); ++k) num += (phis[i][k] - phis[j][k]) * (phis[i][k] - phis[j][k]);
    auto p = set.point(i), q = set.point(j);
    for (int a = 0; a < n; ++a) den += (p[a] - q[a]) * (p[a] - q[a]);
    est.value = std::max(est.value, std::sqrt(num / den));
    ++est.pairs;
  };
  if (m < 10000) {
    est.exhaustive = true;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) ratio(i, j);
    return est;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (std::size_t t = 0; t < samples; ++t) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i != j) ratio(i, j);
  }
  const double reach = 2.0 * delone_constants(set).R_upper;
  SpatialGrid grid(set.points(), n, reach);
  for (std::size_t i = 0; i < m; ++i)
    grid.for_each_within(set.point(i), reach, [&](std::size_t j, double) {
      if (j > i) ratio(i, j);
    });
  return est;
}

struct Annulus {
  double inner, outer;
  std::size_t count;
  double max_residual;
};

/// Least-squares L with phi(x) ~ L (x - x0), residual samples and the
/// dyadic-annulus growth exponent of the largest residual.
struct LinearFit {
  Eigen::MatrixXd L;  // rank x n
  std::vector<std::pair<double, double>> residuals;  // (|x - x0|, |phi(x) - L(x - x0)|)
  std::vector<Annulus> annuli;  // dyadic, only those with >= 10 points
  std::optional<double> exponent;
  std::optional<double> exponent_stderr;
  bool identically_zero = false;
  double pi_L_error = 0.0;  // max |pi o L - I| entry
};

inline LinearFit linear_fit(const ExactPointSet& set, const AddressMap& map) {
  const int n = set.dimension(), r = map.rank();
  const std::size_t m = set.size();
  require(m >= static_cast<std::size_t>(2 * r), ErrorKind::insufficient_data, "linear fit needs >= 2s points");
  Eigen::MatrixXd X(m, n), Phi(m, r);
  auto x0 = set.point(map.reference());
  for (std::size_t i = 0; i < m; ++i) {
    auto p = set.point(i);
    for (int a = 0; a < n; ++a) X(i, a) = p[a] - x0[a];
    auto c = map.phi(set, i);
    for (int k = 0; k < r; ++k) Phi(i, k) = static_cast<double>(c[k]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  require(sv(sv.size() - 1) > 1e-12 * sv(0), ErrorKind::degenerate_geometry, "normal equations are ill-conditioned");
  LinearFit fit;
  fit.L = X.colPivHouseholderQr().solve(Phi).transpose();
  fit.pi_L_error = (map.projection() * fit.L - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();

  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::VectorXd res = Phi.row(i).transpose() - fit.L * X.row(i).transpose();
    fit.residuals.push_back({X.row(i).norm(), res.norm()});
    worst = std::max(worst, res.norm());
  }
  fit.identically_zero = worst <= 1e-9;

  double rmax = 0.0;
  for (auto& [rad, res] : fit.residuals) rmax = std::max(rmax, rad);
  for (double inner = 1.0; inner < rmax; inner *= 2.0) {
    Annulus a{inner, 2.0 * inner, 0, 0.0};
    for (auto& [rad, res] : fit.residuals)
      if (rad >= a.inner && rad < a.outer) ++a.count, a.max_residual = std::max(a.max_residual, res);
    if (a.count >= 10) fit.annuli.push_back(a);
  }
  if (!fit.identically_zero && fit.annuli.size() >= 3) {
    std::vector<double> lx, ly;
    for (const auto& a : fit.annuli)
      if (a.max_residual > 0) lx.push_back(std::log(a.outer)), ly.push_back(std::log(a.max_residual));
    if (lx.size() >= 3) {
      Eigen::MatrixXd A(lx.size(), 2);
      Eigen::VectorXd y(lx.size());
      for (std::size_t i = 0; i < lx.size(); ++i) A(i, 0) = 1.0, A(i, 1) = lx[i], y(i) = ly[i];
      Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y);
      Eigen::VectorXd e = y - A * beta;
      const double dof = static_cast<double>(lx.size()) - 2.0;
      const double sigma2 = dof > 0 ? e.squaredNorm() / dof : 0.0;
      Eigen::MatrixXd cov = sigma2 * (A.transpose() * A).inverse();
      fit.exponent = beta(1);
      fit.exponent_stderr = std::sqrt(cov(1, 1));
    }
  }
  return fit;
}

struct MeyerVerdict {
  std::vector<double> sup_residual;  // per annulus
  bool enough_annuli = false;        // >= 4 annuli with >= 10 points
  double late_variation = 0.0;       // (max - min) / max over the last half
  bool bounded = false;              // enough annuli and late variation < 20%
};

inline MeyerVerdict meyer_residual(const LinearFit& fit) {
  MeyerVerdict v;
  for (const auto& a : fit.annuli) v.sup_residual.push_back(a.max_residual);
  v.enough_annuli = v.sup_residual.size() >= 4;
  if (fit.identically_zero) {
    v.bounded = v.enough_annuli;
    return v;
  }
  if (!v.enough_annuli) return v;
  auto from = v.sup_residual.begin() + static_cast<std::ptrdiff_t>(v.sup_residual.size() / 2);
  auto [lo, hi] = std::minmax_element(from, v.sup_residual.end());
  v.late_variation = *hi > 0 ? (*hi - *lo) / *hi : 0.0;
  v.bounded = v.late_variation < 0.2;
  return v;
}

/// P_i(B): over the integer grid points g of B's cross-section orthogonal to
/// axis i, the address displacement phi(x[(b_i, g)]) - phi(x[(a_i, g)]),
/// weighted 1/2 per boundary coordinate of g. x[t] is the nearest point to t
/// within `radius`, lowest address on ties.
inline WeightDistribution path_displacement_distribution(const ExactPointSet& set, const AddressMap& map, int axis,
                                                         std::optional<double> radius = std::nullopt) {
  const int n = set.dimension();
  require(axis >= 1 && axis <= n, ErrorKind::invalid_argument, "axis must be in 1..n");
  const double R = radius.value_or(delone_constants(set).R_upper * (1.0 + 1e-9) + 1e-12);
  struct Shared {
    std::vector<std::vector<double>> phis;
    std::vector<double> points;  // owned: the grid only views them
    std::unique_ptr<SpatialGrid> grid;
  };
  auto shared = std::make_shared<Shared>();
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto c = map.phi(set, i);
    shared->phis.emplace_back(c.begin(), c.end());
  }
  shared->points = set.points();
  shared->grid = std::make_unique<SpatialGrid>(shared->points, n, std::max(R, 1e-6));
  const auto trusted = set.region().eroded(R);
  require(trusted.has_value(), ErrorKind::window_too_small, "window smaller than the lookup radius");

  WeightDistribution w;
  w.name = "path-displacement";
  w.dimension = n;
  w.components = static_cast<std::size_t>(map.rank());
  w.U0 = 2.0 * R;
  w.evaluate = [shared, trusted = *trusted, R, n, ax = axis - 1, r = map.rank()](const Region& box) {
    require(box.is_box(), ErrorKind::invalid_argument, "path displacement needs a box");
    auto nearest = [&](const Vec& t) {
      require(trusted.contains(t), ErrorKind::window_incomplete, "lookup point too close to the window edge");
      auto hit = shared->grid->nearest(t, R);
      require(hit.has_value(), ErrorKind::window_incomplete, "no set point within R of a path endpoint");
      return hit->index;
    };
    std::vector<std::int64_t> lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
      lo[a] = a == ax ? 0 : static_cast<std::int64_t>(std::ceil(box.lo()[a]));
      hi[a] = a == ax ? 0 : static_cast<std::int64_t>(std::floor(box.hi()[a]));
    }
    std::vector<double> total(r, 0.0);
    std::vector<std::int64_t> g(lo);
    if (std::any_of(lo.begin(), lo.end(), [&, a = 0](std::int64_t v) mutable { return v > hi[a++]; })) return total;
    while (true) {
      double weight = 1.0;
      Vec from(n), to(n);
      for (int a = 0; a < n; ++a) {
        if (a == ax) {
          from[a] = box.lo()[a];
          to[a] = box.hi()[a];
          continue;
        }
        from[a] = to[a] = static_cast<double>(g[a]);
        if (from[a] == box.lo()[a] || from[a] == box.hi()[a]) weight *= 0.5;
      }
      std::size_t i = nearest(from), j = nearest(to);
      for (int k = 0; k < r; ++k) total[k] += weight * (shared->phis[j][k] - shared->phis[i][k]);
      int a = 0;
      for (; a < n; ++a) {
        if (++g[a] <= hi[a]) break;
        g[a] = lo[a];
      }
      if (a == n) break;
    }
    return total;
  };
  return w;
}

}  // namespace delone
