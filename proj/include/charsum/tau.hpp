#pragma once

// Fourier coefficients of the two weight-12/16 level-1 cusp forms that
// feed the GL(2) sources.
//
// The big table: lambda_Delta(p) = tau(p) / p^{11/2} for every prime
// p < 2^26.  tau comes from the eighth power of Jacobi's cube
//
//   prod (1-q^m)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2},
//
// squared three times with number-theoretic transforms modulo three
// 62-bit primes p = c 2^27 + 1 and recombined by CRT.  tau(n) for
// n ~ 6.7e7 needs ~145 bits, so the recombination goes straight to long
// double instead of materializing the integer.
//
// A small exact path (schoolbook squaring in __int128) serves the
// weight-16 form and the test oracles at desk scale.

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/cache.hpp"

namespace charsum::tau {

using arith::i64;
using arith::u64;
using arith::u128;

inline constexpr int kLog2Len = 27;
inline constexpr u64 kLen = 1ull << kLog2Len;
inline constexpr u64 kTabLimit = 1ull << 26;  // tau(n) for n < 2^26

// ---------------------------------------------------------------------------
// number-theoretic transform

// Montgomery arithmetic mod a fixed odd prime below 2^63; the transform
// keeps every value in Montgomery form so the inner loop never divides.
struct Mont {
  u64 p = 0, ninv = 0, r2 = 0;
  explicit Mont(u64 mod) : p(mod) {
    u64 inv = mod;  // p^{-1} mod 2^64 by Newton iteration
    for (int i = 0; i < 6; ++i) inv *= 2 - mod * inv;
    ninv = 0 - inv;
    u64 r64 = (0 - mod) % mod;  // 2^64 mod p
    r2 = (u64)(((u128)r64 * r64) % mod);
  }
  u64 redc(u128 t) const {
    u64 m = (u64)t * ninv;
    u64 r = (u64)((t + (u128)m * p) >> 64);
    return r >= p ? r - p : r;
  }
  u64 mul(u64 a, u64 b) const { return redc((u128)a * b); }
  u64 to(u64 x) const { return mul(x % p, r2); }
  u64 from(u64 x) const { return redc((u128)x); }
  u64 pow(u64 b, u64 e) const {
    u64 r = to(1);
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }
};

struct NttPrime {
  u64 p = 0;
  u64 root = 0;  // primitive 2^24-th root of unity mod p
};

inline std::vector<NttPrime> ntt_primes(int count) {
  std::vector<NttPrime> out;
  for (u64 c = (1ull << (62 - kLog2Len)) - 1; (i64)out.size() < count; --c) {
    u64 p = (c << kLog2Len) + 1;
    if (!arith::is_prime(p)) continue;
    auto fac = arith::factorize(c);
    std::vector<u64> ells{2};
    for (auto& [ell, e] : fac.factors)
      if (ell != 2) ells.push_back(ell);
    u64 g = 2;
    for (;; ++g) {
      bool ok = true;
      for (u64 ell : ells)
        if (arith::powmod(g, (p - 1) / ell, p) == 1) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    out.push_back({p, arith::powmod(g, (p - 1) >> kLog2Len, p)});
  }
  return out;
}

// in-place transform; a holds Montgomery-form values, root_m is a
// Montgomery-form primitive n-th root of unity
inline void ntt(std::vector<u64>& a, const Mont& M, u64 root_m) {
  size_t n = a.size();
  u64 p = M.p;
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j |= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    u64 wlen = M.pow(root_m, (u64)(n / len));
    for (size_t i = 0; i < n; i += len) {
      u64 w = M.to(1);
      for (size_t j = 0; j < len / 2; ++j) {
        u64 u = a[i + j], v = M.mul(a[i + j + len / 2], w);
        a[i + j] = u + v < p ? u + v : u + v - p;
        a[i + j + len / 2] = u >= v ? u - v : u + p - v;
        w = M.mul(w, wlen);
      }
    }
  }
}

inline void ntt_inverse(std::vector<u64>& a, const Mont& M, u64 root_m) {
  ntt(a, M, M.pow(root_m, (u64)a.size() - 1));
  u64 ninv = M.pow(M.to((u64)a.size()), M.p - 2);
  for (auto& x : a) x = M.mul(x, ninv);
}

// ---------------------------------------------------------------------------
// Jacobi cube and its powers

// sparse coefficients of prod (1-q^m)^3 up to degree < limit
inline std::vector<std::pair<u64, i64>> jacobi_cube(u64 limit) {
  std::vector<std::pair<u64, i64>> out;
  for (u64 k = 0;; ++k) {
    u64 t = k * (k + 1) / 2;
    if (t >= limit) break;
    out.push_back({t, (k % 2 ? -1 : 1) * (i64)(2 * k + 1)});
  }
  return out;
}

// exact tau(1..N-1 index shift): tau(n) = coefficient of q^{n-1} in
// (prod (1-q^m)^3)^8, all in __int128 (valid while values fit)
inline std::vector<__int128> exact_tau_upto(u64 N) {
  std::vector<__int128> a(N, 0);
  for (auto& [t, c] : jacobi_cube(N)) a[t] = c;
  for (int round = 0; round < 3; ++round) {
    std::vector<__int128> b(N, 0);
    for (u64 i = 0; i < N; ++i) {
      if (a[i] == 0) continue;
      for (u64 j = 0; i + j < N; ++j) {
        if (a[j] == 0) continue;
        b[i + j] += a[i] * a[j];
      }
    }
    a.swap(b);
  }
  // shift: tau(n) = a[n-1]
  std::vector<__int128> tauv(N, 0);
  for (u64 n = 1; n < N; ++n) tauv[n] = a[n - 1];
  return tauv;
}

// ---------------------------------------------------------------------------
// the prime table

struct DeltaTable {
  std::vector<u64> ps;       // primes < kTabLimit, ascending
  std::vector<double> lam;   // lambda_Delta(p) = tau(p)/p^{11/2}

  double at(u64 p) const {
    auto it = std::lower_bound(ps.begin(), ps.end(), p);
    if (it == ps.end() || *it != p)
      throw std::out_of_range("prime outside coefficient table: " +
                              std::to_string(p));
    return lam[(size_t)(it - ps.begin())];
  }
  u64 limit() const { return kTabLimit; }
};

namespace detail {

inline DeltaTable build_delta_table() {
  DeltaTable T;
  T.ps = arith::primes_up_to(kTabLimit - 1);

  std::vector<double> blob;
  if (cache::load("coeff/delta_lambda.bin", cache::kKindCoeff, kTabLimit,
                  blob) &&
      blob.size() == 2 * T.ps.size()) {
    T.lam.resize(T.ps.size());
    bool ok = true;
    for (size_t i = 0; i < T.ps.size(); ++i) {
      if ((u64)blob[2 * i] != T.ps[i]) ok = false;
      T.lam[i] = blob[2 * i + 1];
    }
    if (ok) return T;
  }

  auto primes = ntt_primes(3);
  auto sparse = jacobi_cube(kTabLimit);
  std::vector<std::vector<u64>> residues(3);

  for (int pi = 0; pi < 3; ++pi) {
    Mont M(primes[pi].p);
    u64 W = M.to(primes[pi].root);
    std::vector<u64> arr(kLen, 0);
    for (auto& [t, c] : sparse)
      arr[t] = M.to(c >= 0 ? (u64)c : M.p - (u64)(-c) % M.p);
    for (int round = 0; round < 3; ++round) {
      ntt(arr, M, W);
      for (auto& x : arr) x = M.mul(x, x);
      ntt_inverse(arr, M, W);
      std::fill(arr.begin() + kTabLimit, arr.end(), 0);
    }
    residues[pi].resize(T.ps.size());
    for (size_t i = 0; i < T.ps.size(); ++i)
      residues[pi][i] = M.from(arr[T.ps[i] - 1]);  // tau(p) = [q^{p-1}] of the 8th power
  }

  // mixed-radix CRT straight into long double
  u64 P1 = primes[0].p, P2 = primes[1].p, P3 = primes[2].p;
  u64 inv12 = arith::inv_mod(P1 % P2, P2);
  u64 inv13 = arith::inv_mod(arith::mulmod(P1 % P3, P2 % P3, P3), P3);
  T.lam.resize(T.ps.size());
  for (size_t i = 0; i < T.ps.size(); ++i) {
    u64 r1 = residues[0][i], r2 = residues[1][i], r3 = residues[2][i];
    u64 t2 = arith::mulmod((r2 + P2 - r1 % P2) % P2, inv12, P2);
    // residue of r1 + P1 t2 mod P3
    u64 r12 = (arith::mulmod(P1 % P3, t2, P3) + r1 % P3) % P3;
    u64 t3 = arith::mulmod((r3 + P3 - r12) % P3, inv13, P3);
    long double t3c = t3 > P3 / 2 ? (long double)t3 - (long double)P3
                                  : (long double)t3;
    long double val = ((t3c * (long double)P2) + (long double)t2) *
                          (long double)P1 +
                      (long double)r1;
    // values are centered: fold the full-product wrap for positive t3
    // handled above via t3c; remaining magnitude check is the Deligne
    // bound |tau(p)| <= 2 p^{11/2}
    long double denom = std::pow((long double)T.ps[i], 5.5L);
    double lv = (double)(val / denom);
    if (!(std::abs(lv) <= 2.0 + 1e-9))
      throw std::logic_error("coefficient table failed the Deligne check");
    T.lam[i] = lv;
  }

  blob.resize(2 * T.ps.size());
  for (size_t i = 0; i < T.ps.size(); ++i) {
    blob[2 * i] = (double)T.ps[i];
    blob[2 * i + 1] = T.lam[i];
  }
  cache::store("coeff/delta_lambda.bin", cache::kKindCoeff, kTabLimit, blob);
  return T;
}

}  // namespace detail

inline const DeltaTable& delta_table() {
  static DeltaTable T = detail::build_delta_table();
  return T;
}

// ---------------------------------------------------------------------------
// weight-16 companion: a(n) of the normalized cusp form of weight 16,
// via multiplication of the weight-12 form by E4

inline std::vector<__int128> exact_weight16_upto(u64 N) {
  auto tauv = exact_tau_upto(N);
  // sigma_3 sieve
  std::vector<u64> s3(N, 0);
  for (u64 d = 1; d < N; ++d)
    for (u64 m = d; m < N; m += d) s3[m] += d * d * d;
  std::vector<__int128> a(N, 0);
  for (u64 n = 1; n < N; ++n) {
    __int128 acc = tauv[n];
    for (u64 k = 1; k < n; ++k) acc += (__int128)240 * (__int128)s3[k] * tauv[n - k];
    a[n] = acc;
  }
  return a;
}

}  // namespace charsum::tau
