#pragma once

#include <cctype>
#include <cstdint>
#include <iterator>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "finop/error.hpp"

namespace finop {

/// Exponent in N ∪ {inf}. Arithmetic is explicit: inf absorbs, finite values
/// are overflow-checked.
struct Exponent {
  bool infinite = false;
  std::uint64_t value = 0;

  static Exponent inf() { return {true, 0}; }
  static Exponent finite(std::uint64_t v) { return {false, v}; }

  friend bool operator==(const Exponent&, const Exponent&) = default;

  friend Exponent operator+(const Exponent& a, const Exponent& b) {
    if (a.infinite || b.infinite) return inf();
    std::uint64_t r;
    if (__builtin_add_overflow(a.value, b.value, &r)) throw Error("supernatural exponent overflow");
    return finite(r);
  }

  Exponent times(std::uint64_t k) const {
    if (k == 0) return finite(0);
    if (infinite) return inf();
    std::uint64_t r;
    if (__builtin_mul_overflow(value, k, &r)) throw Error("supernatural exponent overflow");
    return finite(r);
  }

  bool leq(const Exponent& o) const {
    if (o.infinite) return true;
    if (infinite) return false;
    return value <= o.value;
  }

  std::string str() const { return infinite ? "inf" : std::to_string(value); }
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Formal product of prime powers with exponents in N ∪ {inf}, or the
/// universal number carrying every prime with infinite exponent.
class SupernaturalNumber {
 public:
  using FactorMap = std::map<std::uint64_t, Exponent>;

  SupernaturalNumber() = default;  // the number 1
  explicit SupernaturalNumber(FactorMap factors) : factors_(std::move(factors)) {
    for (auto it = factors_.begin(); it != factors_.end();) {
      if (!is_prime(it->first)) throw Error("supernatural factor " + std::to_string(it->first) + " is not prime");
      it = (!it->second.infinite && it->second.value == 0) ? factors_.erase(it) : std::next(it);
    }
  }

  static SupernaturalNumber universal() {
    SupernaturalNumber s;
    s.universal_ = true;
    return s;
  }

  bool is_universal() const noexcept { return universal_; }
  const FactorMap& factors() const noexcept { return factors_; }

  /// Exponent of prime q (inf for every prime of the universal number).
  Exponent exponent(std::uint64_t q) const {
    if (universal_) return Exponent::inf();
    auto it = factors_.find(q);
    return it == factors_.end() ? Exponent::finite(0) : it->second;
  }

  friend bool operator==(const SupernaturalNumber& a, const SupernaturalNumber& b) {
    if (a.universal_ || b.universal_) return a.universal_ == b.universal_;
    return a.factors_ == b.factors_;
  }

  /// "Universal", "1", or factors in increasing prime order joined by " * ",
  /// e.g. "2^inf * 3^1".
  std::string str() const {
    if (universal_) return "Universal";
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& [q, e] : factors_) {
      if (!out.empty()) out += " * ";
      out += std::to_string(q) + "^" + e.str();
    }
    return out;
  }

  /// Accepts "universal", a positive integer, or a product of "q^k" / "q^inf"
  /// / "q" factors separated by '*'.
  static SupernaturalNumber parse(std::string_view text);

 private:
  bool universal_ = false;
  FactorMap factors_;
};

inline SupernaturalNumber sn_of_int(std::uint64_t m) {
  if (m == 0) throw Error("sn_of_int: argument must be positive");
  SupernaturalNumber::FactorMap f;
  for (std::uint64_t d = 2; d * d <= m; ++d) {
    while (m % d == 0) {
      f[d] = f[d] + Exponent::finite(1);
      m /= d;
    }
  }
  if (m > 1) f[m] = f[m] + Exponent::finite(1);
  return SupernaturalNumber(std::move(f));
}

inline SupernaturalNumber sn_mul(const SupernaturalNumber& a, const SupernaturalNumber& b) {
  if (a.is_universal() || b.is_universal()) return SupernaturalNumber::universal();
  auto f = a.factors();
  for (const auto& [q, e] : b.factors()) f[q] = f[q] + e;
  return SupernaturalNumber(std::move(f));
}

inline SupernaturalNumber sn_pow(const SupernaturalNumber& a, int n) {
  if (n < 1) throw Error("sn_pow: exponent must be >= 1");
  if (a.is_universal()) return a;
  SupernaturalNumber::FactorMap f;
  for (const auto& [q, e] : a.factors()) f[q] = e.times(static_cast<std::uint64_t>(n));
  return SupernaturalNumber(std::move(f));
}

/// a | b: every exponent of a is at most the matching exponent of b.
inline bool sn_divides(const SupernaturalNumber& a, const SupernaturalNumber& b) {
  if (b.is_universal()) return true;
  if (a.is_universal()) return false;
  for (const auto& [q, e] : a.factors())
    if (!e.leq(b.exponent(q))) return false;
  return true;
}

/// Supernatural number of C^{MxM} ⊗ H_{1,1}(base)^{⊗N}, namely M · base^N.
inline SupernaturalNumber classify(int N, int M, const SupernaturalNumber& base) {
  if (N < 1 || M < 1) throw Error("classify: N and M must be positive");
  return sn_mul(sn_of_int(static_cast<std::uint64_t>(M)), sn_pow(base, N));
}

/// CAR algebra iff base = 2^inf and M is a power of two.
inline bool is_car(int /*N*/, int M, const SupernaturalNumber& base) {
  if (M < 1) return false;
  const bool m_pow2 = (M & (M - 1)) == 0;
  SupernaturalNumber::FactorMap two_inf{{2, Exponent::inf()}};
  return m_pow2 && base == SupernaturalNumber(two_inf);
}

/// Exact factorization of n! (Legendre: exponent of q is sum_i floor(n/q^i)).
inline SupernaturalNumber factorial_sn(int n) {
  if (n < 1) throw Error("factorial_sn: n must be >= 1");
  SupernaturalNumber::FactorMap f;
  for (std::uint64_t q = 2; q <= static_cast<std::uint64_t>(n); ++q) {
    if (!is_prime(q)) continue;
    std::uint64_t e = 0;
    for (std::uint64_t pw = q; pw <= static_cast<std::uint64_t>(n); pw *= q) e += static_cast<std::uint64_t>(n) / pw;
    f[q] = Exponent::finite(e);
  }
  return SupernaturalNumber(std::move(f));
}

inline SupernaturalNumber SupernaturalNumber::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto to_u64 = [&](std::string_view s) -> std::uint64_t {
    s = trim(s);
    if (s.empty()) throw Error("malformed supernatural number '" + std::string(text) + "'");
    std::uint64_t v = 0;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw Error("malformed supernatural number '" + std::string(text) + "'");
      if (__builtin_mul_overflow(v, 10u, &v) || __builtin_add_overflow(v, static_cast<std::uint64_t>(c - '0'), &v))
        throw Error("supernatural number literal too large");
    }
    return v;
  };

  std::string lower;
  for (char c : trim(text)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "universal" || lower == "u") return universal();

  SupernaturalNumber acc;
  std::string_view rest = lower;
  while (true) {
    const auto star = rest.find('*');
    const std::string_view item = trim(rest.substr(0, star));
    const auto caret = item.find('^');
    if (caret == std::string_view::npos) {
      acc = sn_mul(acc, sn_of_int(to_u64(item)));
    } else {
      const std::uint64_t q = to_u64(item.substr(0, caret));
      if (!is_prime(q)) throw Error("supernatural factor base " + std::to_string(q) + " is not prime");
      const std::string_view ex = trim(item.substr(caret + 1));
      const Exponent e = (ex == "inf" || ex == "infinity") ? Exponent::inf() : Exponent::finite(to_u64(ex));
      acc = sn_mul(acc, SupernaturalNumber(FactorMap{{q, e}}));
    }
    if (star == std::string_view::npos) break;
    rest = rest.substr(star + 1);
  }
  return acc;
}

}  // namespace finop
