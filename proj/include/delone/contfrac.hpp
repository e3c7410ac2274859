#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "delone/error.hpp"

namespace delone {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

/// floor(a / b) for b > 0.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;  // truncates toward zero
  if (a % b != 0 && a < 0) q -= 1;
  return q;
}

inline std::int64_t floor_div128(__int128 a, __int128 b) {
  __int128 q = a / b;
  if (a % b != 0 && a < 0) --q;
  return static_cast<std::int64_t>(q);
}

inline BigInt ceil_rational(const Rational& x) {
  BigInt n = boost::multiprecision::numerator(x), d = boost::multiprecision::denominator(x);
  return -floor_div(-n, d);
}

}  // namespace detail

struct Convergent {
  BigInt p;
  BigInt q;
};

/// alpha = [0; a_1, a_2, ...] held by its partial quotients. Quotients past the
/// stored prefix come from an optional generator; convergents are memoised in
/// a cache shared between copies and guarded by a mutex.
class ContinuedFraction {
 public:
  using Generator = std::function<BigInt(std::size_t)>;  // k >= 1 -> a_k

  static ContinuedFraction finite(std::vector<BigInt> quotients) {
    for (const auto& a : quotients)
      require(a >= 1, ErrorKind::invalid_argument, "partial quotients must be >= 1");
    ContinuedFraction cf;
    cf.state_->quotients = std::move(quotients);
    cf.label_ = "cf:" + join(cf.state_->quotients);
    return cf;
  }

  static ContinuedFraction finite(std::initializer_list<int> quotients) {
    return finite(std::vector<BigInt>(quotients.begin(), quotients.end()));
  }

  /// Purely periodic quotients repeating `period` forever.
  static ContinuedFraction periodic(std::vector<BigInt> period) {
    require(!period.empty(), ErrorKind::invalid_argument, "period must be nonempty");
    for (const auto& a : period)
      require(a >= 1, ErrorKind::invalid_argument, "partial quotients must be >= 1");
    std::string label = "cf:" + join(period) + ",...";
    auto gen = [period = std::move(period)](std::size_t k) { return period[(k - 1) % period.size()]; };
    return generated(std::move(gen), std::move(label));
  }

  static ContinuedFraction periodic(std::initializer_list<int> period) {
    return periodic(std::vector<BigInt>(period.begin(), period.end()));
  }

  static ContinuedFraction golden() {
    auto cf = periodic({1});
    cf.label_ = "golden";
    return cf;
  }

  static ContinuedFraction generated(Generator gen, std::string label) {
    ContinuedFraction cf;
    cf.state_->generator = std::move(gen);
    cf.label_ = std::move(label);
    return cf;
  }

  /// Expansion of x in (0, 1), stopped once |x - p_k/q_k| < cutoff. The result
  /// is a finite (rational) fraction.
  static ContinuedFraction from_decimal(double x, double cutoff = 1e-12) {
    require(x > 0.0 && x < 1.0, ErrorKind::invalid_argument, "decimal alpha must lie in (0, 1)");
    std::vector<BigInt> qs;
    long double y = x;
    long double p_prev = 1, p = 0, q_prev = 0, q = 1;
    for (int it = 0; it < 60; ++it) {
      long double inv = 1.0L / y;
      long double a = std::floor(inv);
      if (a < 1) a = 1;
      qs.emplace_back(static_cast<long long>(a));
      long double pn = a * p + p_prev, qn = a * q + q_prev;
      p_prev = p, q_prev = q, p = pn, q = qn;
      if (std::fabs(static_cast<long double>(x) - p / q) < cutoff) break;
      y = inv - a;
      if (y <= 0) break;
    }
    auto cf = finite(std::move(qs));
    cf.label_ = "decimal:" + to_decimal_string(x) + "=" + cf.label_;
    return cf;
  }

  bool is_finite() const { return !state_->generator; }
  const std::string& label() const { return label_; }

  /// Number of stored quotients for finite fractions.
  std::optional<std::size_t> length() const {
    if (!is_finite()) return std::nullopt;
    return state_->quotients.size();
  }

  bool has_quotient(std::size_t k) const {
    if (k == 0) return false;
    return !is_finite() || k <= state_->quotients.size();
  }

  /// a_k for k >= 1.
  BigInt quotient(std::size_t k) const {
    require(k >= 1, ErrorKind::invalid_argument, "quotients are indexed from 1");
    std::lock_guard lock(state_->mu);
    extend_locked(k);
    return state_->quotients[k - 1];
  }

  /// p_k / q_k with p_0 = 0, q_0 = 1 (and p_{-1} = 1, q_{-1} = 0).
  Convergent convergent(std::size_t k) const {
    std::lock_guard lock(state_->mu);
    extend_locked(k);
    return {state_->p[k], state_->q[k]};
  }

  /// floor(m * alpha), exact.
  std::int64_t floor_multiple(std::int64_t m) const {
    if (m == 0) return 0;
    std::lock_guard lock(state_->mu);
    if (is_finite()) {
      std::size_t K = state_->quotients.size();
      extend_locked(K);
      return floor_of(m, state_->p[K], state_->q[K]);
    }
    // Start where the convergent error m/(q_j q_{j+1}) is already below 1/2.
    const BigInt target = 2 * BigInt(m < 0 ? -m : m);
    std::size_t j = 1;
    extend_locked(j + 1);
    while (state_->q[j] <= target) extend_locked(++j + 1);
    for (;; ++j) {
      extend_locked(j + 1);
      std::int64_t a = floor_of(m, state_->p[j], state_->q[j]);
      std::int64_t b = floor_of(m, state_->p[j + 1], state_->q[j + 1]);
      // alpha lies strictly between consecutive convergents
      if (a == b) return a;
    }
  }

  /// ceil(m * alpha), exact.
  std::int64_t ceil_multiple(std::int64_t m) const {
    if (m == 0) return 0;
    if (is_finite()) {
      auto c = convergent(*length());
      BigInt v = -detail::floor_div(-BigInt(m) * c.p, c.q);
      return static_cast<std::int64_t>(v);
    }
    return floor_multiple(m) + 1;  // m * alpha is never an integer for m != 0
  }

  double value() const {
    std::size_t K = is_finite() ? state_->quotients.size() : 40;
    if (K == 0) return 0.0;
    auto c = convergent(K);
    return static_cast<double>(Rational(c.p, c.q));
  }

  /// Quotients a_1..a_K rendered as "cf:a1,a2,...".
  std::string describe(std::size_t K) const {
    std::vector<BigInt> qs;
    for (std::size_t k = 1; k <= K && has_quotient(k); ++k) qs.push_back(quotient(k));
    return "cf:" + join(qs) + (is_finite() && K >= *length() ? "" : ",...");
  }

 private:
  struct State {
    std::mutex mu;
    std::vector<BigInt> quotients;
    Generator generator;
    std::vector<BigInt> p{0}, q{1};  // index k holds p_k, q_k
    BigInt p_prev = 1, q_prev = 0;   // p_{-1}, q_{-1}
  };

  ContinuedFraction() : state_(std::make_shared<State>()) {}

  void extend_locked(std::size_t k) const {
    State& s = *state_;
    if (k > s.quotients.size()) {
      if (!s.generator)
        fail(ErrorKind::needs_more_terms, "finite continued fraction has only " +
                                              std::to_string(s.quotients.size()) + " quotients");
      while (s.quotients.size() < k) {
        BigInt a = s.generator(s.quotients.size() + 1);
        require(a >= 1, ErrorKind::invalid_argument, "generated partial quotient must be >= 1");
        s.quotients.push_back(std::move(a));
      }
    }
    while (s.p.size() <= k) {
      std::size_t j = s.p.size();  // compute p_j, q_j
      const BigInt& a = s.quotients[j - 1];
      const BigInt& pm2 = j >= 2 ? s.p[j - 2] : s.p_prev;
      const BigInt& qm2 = j >= 2 ? s.q[j - 2] : s.q_prev;
      s.p.push_back(a * s.p[j - 1] + pm2);
      s.q.push_back(a * s.q[j - 1] + qm2);
    }
  }

  static std::int64_t floor_of(std::int64_t m, const BigInt& p, const BigInt& q) {
    static const BigInt limit = BigInt(1) << 62;
    if (q < limit && p < limit)
      return detail::floor_div128(static_cast<__int128>(m) * static_cast<__int128>(static_cast<std::int64_t>(p)),
                                  static_cast<__int128>(static_cast<std::int64_t>(q)));
    return static_cast<std::int64_t>(detail::floor_div(BigInt(m) * p, q));
  }

  static std::string join(const std::vector<BigInt>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
  }

  static std::string to_decimal_string(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  std::shared_ptr<State> state_;
  std::string label_;
};

/// Parses "golden", "cf:a1,a2,..." (trailing ",..." repeats the listed
/// quotients forever) or a decimal in (0, 1).
inline ContinuedFraction parse_alpha(const std::string& text) {
  if (text == "golden") return ContinuedFraction::golden();
  if (text.rfind("cf:", 0) == 0) {
    std::string body = text.substr(3);
    bool repeating = false;
    if (body.size() >= 3 && body.compare(body.size() - 3, 3, "...") == 0) {
      repeating = true;
      body.erase(body.size() - 3);
      while (!body.empty() && (body.back() == ',' || body.back() == ' ')) body.pop_back();
    }
    std::vector<BigInt> qs;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      require(!item.empty() && item.find_first_not_of("0123456789 ") == std::string::npos,
              ErrorKind::invalid_argument, "bad partial quotient '" + item + "' in " + text);
      qs.emplace_back(item);
    }
    require(!qs.empty(), ErrorKind::invalid_argument, "no partial quotients in " + text);
    return repeating ? ContinuedFraction::periodic(std::move(qs)) : ContinuedFraction::finite(std::move(qs));
  }
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (...) {
    fail(ErrorKind::invalid_argument, "cannot parse alpha '" + text + "'");
  }
  require(used == text.size(), ErrorKind::invalid_argument, "cannot parse alpha '" + text + "'");
  return ContinuedFraction::from_decimal(x);
}

/// All convergents (p_k, q_k) for k = 0..K.
inline std::vector<Convergent> convergents(const ContinuedFraction& cf, std::size_t K) {
  std::vector<Convergent> out;
  out.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) out.push_back(cf.convergent(k));
  return out;
}

/// Recurrence function of the Beatty word: q_k + q_{k+1} where k is the
/// largest index with q_k <= l.
inline BigInt recurrence_formula(const ContinuedFraction& cf, std::int64_t l) {
  require(l >= 1, ErrorKind::invalid_argument, "word length must be >= 1");
  std::size_t k = 0;
  while (cf.convergent(k + 1).q <= l) ++k;
  return cf.convergent(k).q + cf.convergent(k + 1).q;
}

/// max(a_1..a_K) <= bound. A finite-K proxy only: it says nothing about later
/// quotients.
inline bool is_badly_approximable(const ContinuedFraction& cf, std::size_t K, const BigInt& bound) {
  for (std::size_t k = 1; k <= K; ++k)
    if (cf.quotient(k) > bound) return false;
  return true;
}

using GrowthFunction = std::function<Rational(const BigInt&)>;

struct GrowthCheck {
  std::size_t k;
  BigInt q_k;
  BigInt recurrence;  // q_k + q_{k+1}
  Rational growth;    // g(q_k)
  bool exceeds() const { return Rational(recurrence) > growth; }
};

struct GrowthConstruction {
  ContinuedFraction cf;
  std::vector<GrowthCheck> checks;
};

/// Chooses a_{k+1} = max(1, ceil(g(q_k))) for k = 0..K-1, so the recurrence
/// function at q_k exceeds g(q_k).
inline GrowthConstruction construct_alpha_for_growth(const GrowthFunction& g, std::size_t K,
                                                     std::size_t bit_budget = 1u << 20) {
  require(K >= 1, ErrorKind::invalid_argument, "K must be >= 1");
  std::vector<BigInt> quotients;
  BigInt q_prev = 0, q = 1;  // q_{-1}, q_0
  std::vector<BigInt> qs{q};
  for (std::size_t k = 0; k < K; ++k) {
    BigInt a = detail::ceil_rational(g(q));
    if (a < 1) a = 1;
    BigInt next = a * q + q_prev;
    require(boost::multiprecision::msb(next) < bit_budget, ErrorKind::resource_limit,
            "denominators exceed the big-integer budget at k = " + std::to_string(k + 1));
    quotients.push_back(std::move(a));
    q_prev = q;
    q = next;
    qs.push_back(q);
  }
  GrowthConstruction out{ContinuedFraction::finite(quotients), {}};
  for (std::size_t k = 0; k < K; ++k)
    out.checks.push_back({k, qs[k], qs[k] + qs[k + 1], g(qs[k])});
  return out;
}

}  // namespace delone
