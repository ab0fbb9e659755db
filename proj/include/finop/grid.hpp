#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "finop/error.hpp"

namespace finop {

/// Integer power with overflow detection.
inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) throw Error("integer power overflow");
  }
  return r;
}

/// Upper bound on any materialized matrix dimension K. Read from FINOP_MAX_K,
/// default 2000.
inline std::size_t max_k() {
  if (const char* env = std::getenv("FINOP_MAX_K")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 2000;
}

/// The common frame: torus dimension N, vector size M, p cells per axis
/// (cell side 1/p). Cells are enumerated lexicographically with axis 1 the
/// most significant digit.
struct GridSpec {
  int N = 1;
  int M = 1;
  int p = 1;

  GridSpec() = default;
  GridSpec(int n, int m, int cells_per_axis) : N(n), M(m), p(cells_per_axis) {
    if (N < 1 || M < 1 || p < 1)
      throw Error("invalid grid N=" + std::to_string(N) + " M=" + std::to_string(M) +
                  " p=" + std::to_string(p));
  }

  std::size_t cell_count() const { return ipow(static_cast<std::size_t>(p), N); }
  std::size_t dimension() const { return static_cast<std::size_t>(M) * cell_count(); }

  GridSpec with_p(int q) const { return GridSpec(N, M, q); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  std::string str() const {
    return "(N=" + std::to_string(N) + ", M=" + std::to_string(M) + ", p=" + std::to_string(p) + ")";
  }
  friend std::ostream& operator<<(std::ostream& os, const GridSpec& g) { return os << g.str(); }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grid " + a.str() + " vs " + b.str());
}

/// Coordinates of one grid cell (or one shift in Z_p^N).
using CellIndex = std::vector<int>;

inline std::size_t flatten(const CellIndex& c, int p) {
  std::size_t flat = 0;
  for (int v : c) {
    if (v < 0 || v >= p) throw Error("cell coordinate out of range");
    flat = flat * static_cast<std::size_t>(p) + static_cast<std::size_t>(v);
  }
  return flat;
}

inline CellIndex unflatten(std::size_t flat, int N, int p) {
  CellIndex c(static_cast<std::size_t>(N));
  for (int a = N - 1; a >= 0; --a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(p));
    flat /= static_cast<std::size_t>(p);
  }
  if (flat != 0) throw Error("flat cell index out of range");
  return c;
}

/// Flat index of (a + b) mod p componentwise, both given flat. Used for
/// "cell r shifted by j" and for shift arithmetic in Z_p^N.
inline std::size_t add_mod(std::size_t a, std::size_t b, int N, int p) {
  const auto P = static_cast<std::size_t>(p);
  std::size_t out = 0;
  std::size_t scale = 1;
  for (int i = 0; i < N; ++i) {
    const std::size_t da = a % P, db = b % P;
    out += ((da + db) % P) * scale;
    a /= P;
    b /= P;
    scale *= P;
  }
  return out;
}

/// Flat index of -a mod p componentwise.
inline std::size_t neg_mod(std::size_t a, int N, int p) {
  const auto P = static_cast<std::size_t>(p);
  std::size_t out = 0;
  std::size_t scale = 1;
  for (int i = 0; i < N; ++i) {
    const std::size_t da = a % P;
    out += ((P - da) % P) * scale;
    a /= P;
    scale *= P;
  }
  return out;
}

/// Flat index of (b - a) mod p componentwise.
inline std::size_t sub_mod(std::size_t b, std::size_t a, int N, int p) {
  return add_mod(b, neg_mod(a, N, p), N, p);
}

}  // namespace finop
