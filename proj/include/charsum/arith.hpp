#pragma once

// 64-bit modular arithmetic with 128-bit intermediates, deterministic
// factorization, CRT helpers, and small multiplicative utilities.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace charsum::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u128)a * b % m; }

inline u64 addmod(u64 a, u64 b, u64 m) {
  a %= m; b %= m;
  u64 s = a + b;
  if (s < a || s >= m) s -= m;
  return s;
}

inline u64 powmod(u64 a, u64 e, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Extended gcd on signed 128-bit so u64 inputs never overflow.
inline i128 egcd(i128 a, i128 b, i128& x, i128& y) {
  if (b == 0) { x = 1; y = 0; return a; }
  i128 x1, y1;
  i128 g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

struct Residue {
  u64 value = 0;
  u64 modulus = 1;
};

// Inverse of a modulo m. Throws if gcd(a, m) != 1. inv_mod(x, 1) = 0.
inline u64 inv_mod(u64 a, u64 m) {
  if (m == 0) throw std::invalid_argument("inv_mod: zero modulus");
  if (m == 1) return 0;
  i128 x, y;
  i128 g = egcd((i128)(a % m), (i128)m, x, y);
  if (g != 1 && g != -1)
    throw std::domain_error("inv_mod: argument not coprime to modulus");
  i128 r = x % (i128)m;
  if (r < 0) r += m;
  return (u64)r;
}

// --- deterministic primality (Miller-Rabin, full 64-bit range) ---

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  // This witness set is deterministic for all n < 2^64.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

// Pollard rho (Brent cycle finding) with a deterministic sequence of
// polynomial offsets; only ever called on odd composites with no factor
// below 10^4, so it terminates quickly in practice.
inline u64 pollard_rho(u64 n) {
  if ((n & 1) == 0) return 2;
  for (u64 c = 1;; ++c) {
    auto f = [n, c](u64 x) { return (u64)(((u128)x * x + c) % n); };
    u64 x = 2, y = 2, d = 1;
    u64 power = 1, lam = 1;
    while (d == 1) {
      if (power == lam) { x = y; power <<= 1; lam = 0; }
      y = f(y);
      ++lam;
      u64 diff = x > y ? x - y : y - x;
      if (diff == 0) break;
      d = std::gcd(diff, n);
    }
    if (d != 1 && d != n) return d;
  }
}

struct Factored {
  u64 value = 1;
  std::vector<std::pair<u64, int>> factors;  // (prime, exponent), ascending

  bool is_squarefree() const {
    for (auto& [p, e] : factors)
      if (e > 1) return false;
    return true;
  }
  int omega() const { return (int)factors.size(); }
  int mobius() const {
    if (!is_squarefree()) return 0;
    return (factors.size() % 2 == 0) ? 1 : -1;
  }
  u64 phi() const {
    u64 r = 1;
    for (auto& [p, e] : factors) {
      r *= p - 1;
      for (int i = 1; i < e; ++i) r *= p;
    }
    return r;
  }
  u64 radical() const {
    u64 r = 1;
    for (auto& [p, e] : factors) r *= p;
    return r;
  }
  std::vector<u64> divisors() const {
    std::vector<u64> d{1};
    for (auto& [p, e] : factors) {
      size_t sz = d.size();
      u64 pk = 1;
      for (int i = 0; i < e; ++i) {
        pk *= p;
        for (size_t j = 0; j < sz; ++j) d.push_back(d[j] * pk);
      }
    }
    std::sort(d.begin(), d.end());
    return d;
  }
};

inline Factored factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
  Factored f;
  f.value = n;
  for (u64 p = 2; p <= 10000 && p * p <= n; p = (p == 2 ? 3 : p + 2)) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) { n /= p; ++e; }
      f.factors.push_back({p, e});
    }
  }
  // Recurse on the remaining cofactor with rho splitting.
  std::vector<u64> stack;
  if (n > 1) stack.push_back(n);
  std::vector<std::pair<u64, int>> extra;
  while (!stack.empty()) {
    u64 m = stack.back();
    stack.pop_back();
    if (m == 1) continue;
    if (is_prime(m)) {
      bool merged = false;
      for (auto& [p, e] : extra)
        if (p == m) { ++e; merged = true; break; }
      if (!merged) extra.push_back({m, 1});
      continue;
    }
    u64 d = pollard_rho(m);
    stack.push_back(d);
    stack.push_back(m / d);
  }
  for (auto& pe : extra) f.factors.push_back(pe);
  std::sort(f.factors.begin(), f.factors.end());
  return f;
}

inline u64 euler_phi(u64 n) { return factorize(n).phi(); }

inline int mobius(u64 n) { return factorize(n).mobius(); }

// Units of Z/q as a materialized list (intended for moduli up to ~10^7).
inline std::vector<u64> units(u64 q) {
  if (q == 0) throw std::invalid_argument("units: zero modulus");
  if (q == 1) return {0};
  std::vector<u64> u;
  u.reserve(q / 2);
  for (u64 x = 1; x < q; ++x)
    if (std::gcd(x, q) == 1) u.push_back(x);
  return u;
}

// --- CRT ---

inline std::pair<Residue, Residue> crt_split(Residue x, u64 r, u64 s) {
  if (std::gcd(r, s) != 1)
    throw std::domain_error("crt_split: moduli not coprime");
  if (x.modulus != r * s)
    throw std::invalid_argument("crt_split: modulus mismatch");
  return {Residue{x.value % r, r}, Residue{x.value % s, s}};
}

inline Residue crt_combine(Residue a, Residue b) {
  u64 r = a.modulus, s = b.modulus;
  if (std::gcd(r, s) != 1)
    throw std::domain_error("crt_combine: moduli not coprime");
  // x = a + r * ((b - a) * r^{-1} mod s)
  u64 rinv = inv_mod(r % s, s);
  u64 diff = addmod(b.value + s - a.value % s, 0, s);
  u64 t = mulmod(diff, rinv, s);
  u128 x = (u128)a.value + (u128)r * t;
  return Residue{(u64)(x % ((u128)r * s)), r * s};
}

// --- prime sieves (shared utility) ---

inline std::vector<u64> primes_up_to(u64 n) {
  std::vector<bool> comp(n + 1, false);
  std::vector<u64> ps;
  for (u64 i = 2; i <= n; ++i) {
    if (!comp[i]) {
      ps.push_back(i);
      for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
  }
  return ps;
}

inline std::vector<u64> primes_in(u64 lo, u64 hi) {  // [lo, hi)
  std::vector<u64> ps;
  for (u64 p = std::max<u64>(lo, 2); p < hi; ++p)
    if (is_prime(p)) ps.push_back(p);
  return ps;
}

}  // namespace charsum::arith
