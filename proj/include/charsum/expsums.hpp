#pragma once

// Complete exponential sums built from Gauss sums over primitive
// characters:
//
//   T_k(l; q)  = (1/sqrt q) sum_{chi primitive mod q} (tau(chi)/sqrt q)^k chi(l)
//   K_k(u; p)  = (1/p^{(k-1)/2}) sum_{x_1...x_k = u (p)} e((x_1+...+x_k)/p)
//   KK_k(v1, v2, l; r, s1, s2)
//              = (1/sqrt(r s1 s2)) sum_{x unit mod r s1 s2}
//                    T_k(v1 x; r s1) T_k(v2 x; r s2) e(l x / (r s1 s2))
//
// plus the coprime-split and prime-level identities relating them, a
// Poisson-summation self-check, and a brute bilinear form in inverse
// fractions e(l m~ / n).
//
// Brute evaluators are budget-capped; the factored evaluators reduce to
// prime-level data and stay cheap.  Per-prime value tables are memoized
// because the same primes recur across thousands of calls.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/dirichlet.hpp"

namespace charsum::expsums {

using arith::Factored;
using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

inline constexpr u64 kBruteTCap = 10000;    // modulus cap for t_k_brute
inline constexpr u64 kBruteKKCap = 100000;  // cap on r*s1*s2 for kk_brute
inline constexpr double kNestedLoopCap = 1e7;

inline std::vector<cplx> unit_circle_table(u64 q) {
  std::vector<cplx> t(q);
  for (u64 x = 0; x < q; ++x) {
    double th = 2.0 * std::numbers::pi * (double)x / (double)q;
    t[x] = {std::cos(th), std::sin(th)};
  }
  return t;
}

// ---------------------------------------------------------------------------
// T_k at primes: one table per (p, k) holding T_k(v; p) for v in [0, p)

namespace detail {

inline const std::vector<cplx>& prime_t_table(u64 p, int k) {
  static std::map<std::pair<u64, int>, std::unique_ptr<std::vector<cplx>>> memo;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, k);
  auto it = memo.find(key);
  if (it != memo.end()) return *it->second;

  auto tab = std::make_unique<std::vector<cplx>>(p, cplx{0.0, 0.0});
  if (p == 2) {
    // no primitive characters mod 2: T_k(.; 2) = 0
  } else {
    const auto& gauss = dirichlet::local_gauss_table(p);
    const auto& dt = dirichlet::dlog_table(p);
    double rp = std::sqrt((double)p);
    // coefficient per exponent: (tau_e / sqrt p)^k, trivial e = 0 excluded
    std::vector<cplx> coef(p - 1, cplx{0.0, 0.0});
    for (u64 e = 1; e + 1 < p; ++e) {
      cplx t = gauss[e] / rp, acc{1.0, 0.0};
      for (int j = 0; j < k; ++j) acc *= t;
      coef[e] = acc;
    }
    // B[d] = sum_e coef[e] zeta_{p-1}^{e d}, then T_k(v; p) = B[dlog v]/sqrt p
    auto zeta = unit_circle_table(p - 1);
    std::vector<cplx> B(p - 1, cplx{0.0, 0.0});
    for (u64 d = 0; d + 1 < p; ++d) {
      cplx acc{0.0, 0.0};
      for (u64 e = 1; e + 1 < p; ++e) acc += coef[e] * zeta[(e * d) % (p - 1)];
      B[d] = acc;
    }
    for (u64 v = 1; v < p; ++v) (*tab)[v] = B[dt.dlog[v]] / rp;
  }
  const std::vector<cplx>& ref = *tab;
  memo.emplace(key, std::move(tab));
  return ref;
}

}  // namespace detail

// T_k(y; m) for all y mod m at once, via the coprime-split identity
// T_k(y; p m') = T_k(y p^k; m') T_k(y m'^k; p) peeled down to primes.
inline std::vector<cplx> t_k_array(const Factored& m, int k) {
  if (!m.is_squarefree())
    throw std::domain_error("t_k_array requires squarefree modulus");
  if (k < 1 || k > 9) throw std::invalid_argument("k out of range");
  std::vector<cplx> out(m.value, cplx{1.0, 0.0});
  for (auto& [p, e] : m.factors) {
    const auto& loc = detail::prime_t_table(p, k);
    u64 cof = arith::powmod((m.value / p) % p, (u64)k, p);
    for (u64 y = 0; y < m.value; ++y) out[y] *= loc[(y % p) * cof % p];
  }
  return out;
}

// ---------------------------------------------------------------------------
// T_k single values

struct TransformValue {
  cplx value{0.0, 0.0};
  u64 modulus = 1;
  int k = 1;
};

// Literal enumeration over primitive characters.
inline TransformValue t_k_brute(u64 ell, const Factored& q, int k) {
  if (!q.is_squarefree())
    throw std::domain_error("t_k_brute requires squarefree modulus");
  if (k < 1 || k > 8) throw std::invalid_argument("k out of [1, 8]");
  if (q.value > kBruteTCap) throw std::length_error("t_k_brute budget");
  TransformValue r{{0.0, 0.0}, q.value, k};
  if (q.value == 1) {
    r.value = {1.0, 0.0};
    return r;
  }
  if (std::gcd(ell % q.value, q.value) != 1) return r;
  dirichlet::CharacterGroup G(q);
  double rq = std::sqrt((double)q.value);
  cplx acc{0.0, 0.0};
  for (u64 idx : G.primitive_indices()) {
    auto chi = G.character(idx);
    cplx t = dirichlet::gauss_sum_assembled(chi) / rq, pw{1.0, 0.0};
    for (int j = 0; j < k; ++j) pw *= t;
    acc += pw * G.eval(chi, ell);
  }
  r.value = acc / rq;
  return r;
}

// Two-factor split T_k(m; rs) = T_k(m r^k; s) T_k(m s^k; r).
inline TransformValue t_k_factored(u64 ell, const Factored& r,
                                   const Factored& s, int k) {
  if (std::gcd(r.value, s.value) != 1)
    throw std::invalid_argument("t_k_factored requires coprime split");
  auto a = t_k_brute(ell % s.value * arith::powmod(r.value % s.value, (u64)k,
                                                   s.value) %
                         s.value,
                     s, k);
  auto b = t_k_brute(ell % r.value * arith::powmod(s.value % r.value, (u64)k,
                                                   r.value) %
                         r.value,
                     r, k);
  return TransformValue{a.value * b.value, r.value * s.value, k};
}

// Full peel to prime level; cheap for any squarefree modulus.
inline TransformValue t_k_prime_factored(u64 ell, const Factored& q, int k) {
  if (!q.is_squarefree())
    throw std::domain_error("t_k_prime_factored requires squarefree modulus");
  TransformValue r{{1.0, 0.0}, q.value, k};
  for (auto& [p, e] : q.factors) {
    const auto& loc = detail::prime_t_table(p, k);
    u64 cof = arith::powmod((q.value / p) % p, (u64)k, p);
    r.value *= loc[(ell % p) * cof % p];
  }
  return r;
}

// ---------------------------------------------------------------------------
// hyper-Kloosterman sums

// K_k(u; p), normalized by p^{(k-1)/2}.  Nested loop when p^{k-1} is
// small; otherwise k-1 rounds of multiplicative convolution against
// e(t/p), each O(p^2).
inline cplx hyper_kloosterman(u64 u, u64 p, int k,
                              bool allow_convolution = true) {
  if (k < 2 || k > 6) throw std::invalid_argument("k out of [2, 6]");
  if (!arith::is_prime(p)) throw std::invalid_argument("p must be prime");
  if (u % p == 0) throw std::invalid_argument("u must be a unit mod p");
  u %= p;
  double norm = std::pow((double)p, (double)(k - 1) / 2.0);
  auto ex = unit_circle_table(p);

  if (std::pow((double)p, (double)(k - 1)) <= kNestedLoopCap) {
    // x_1, ..., x_{k-1} free units, last coordinate forced
    std::vector<u64> x(k - 1, 1);
    cplx acc{0.0, 0.0};
    while (true) {
      u64 prod = 1, sum = 0;
      for (u64 xi : x) {
        prod = prod * xi % p;
        sum += xi;
      }
      u64 last = arith::mulmod(u, arith::inv_mod(prod, p), p);
      acc += ex[(sum + last) % p];
      int i = 0;
      for (; i < k - 1; ++i) {
        if (++x[i] < p) break;
        x[i] = 1;
      }
      if (i == k - 1) break;
    }
    return acc / norm;
  }

  if (!allow_convolution) throw std::length_error("hyper_kloosterman budget");
  // S_1(v) = e(v/p); S_j(v) = sum_t S_{j-1}(v t~) e(t/p)
  std::vector<cplx> S(p), next(p);
  for (u64 v = 1; v < p; ++v) S[v] = ex[v];
  for (int j = 2; j <= k; ++j) {
    std::fill(next.begin(), next.end(), cplx{0.0, 0.0});
    for (u64 t = 1; t < p; ++t)
      // add e(t/p) * S[w] into next[w t], i.e. next[v] += S[v t~] e(t/p)
      for (u64 w = 1; w < p; ++w) next[arith::mulmod(w, t, p)] += S[w] * ex[t];
    std::swap(S, next);
  }
  return S[u] / norm;
}

// T_k(v; p) = ((p-1)/p) K_k(v~; p) - (-1)^k / p^{(k+1)/2}
inline TransformValue t_k_via_kloosterman(u64 v, u64 p, int k) {
  TransformValue r{{0.0, 0.0}, p, k};
  if (v % p == 0) return r;
  cplx K = hyper_kloosterman(arith::inv_mod(v % p, p), p, k);
  double tail = ((k % 2) ? -1.0 : 1.0) / std::pow((double)p, (double)(k + 1) / 2.0);
  r.value = ((double)(p - 1) / (double)p) * K - tail;
  return r;
}

// ---------------------------------------------------------------------------
// paired sums KK_k

struct KKParams {
  u64 v1 = 1, v2 = 1;
  i64 ell = 0;
  Factored r, s1, s2;

  void validate() const {
    if (!r.is_squarefree() || !s1.is_squarefree() || !s2.is_squarefree())
      throw std::invalid_argument("KK moduli must be squarefree");
    if (std::gcd(r.value, s1.value * s2.value) != 1)
      throw std::invalid_argument("KK requires gcd(r, s1 s2) = 1");
  }
  u64 d() const { return std::gcd(s1.value, s2.value); }
  u64 s1_star() const { return s1.value / d(); }
  u64 s2_star() const { return s2.value / d(); }
  u64 product() const { return r.value * s1.value * s2.value; }
};

// Exact unit-group summation, O(r s1 s2) with per-modulus value tables.
inline cplx kk_brute(const KKParams& P, int k) {
  P.validate();
  u64 Q = P.product();
  if (Q > kBruteKKCap) throw std::length_error("kk_brute budget");
  u64 m1 = P.r.value * P.s1.value, m2 = P.r.value * P.s2.value;
  auto T1 = t_k_array(arith::factorize(m1), k);
  auto T2 = t_k_array(arith::factorize(m2), k);
  auto ex = unit_circle_table(Q);
  u64 lm = (u64)(((P.ell % (i64)Q) + (i64)Q) % (i64)Q);
  cplx acc{0.0, 0.0};
  for (u64 x = 0; x < Q; ++x) {
    if (std::gcd(x, Q) != 1) continue;
    acc += T1[arith::mulmod(P.v1 % m1, x % m1, m1)] *
           T2[arith::mulmod(P.v2 % m2, x % m2, m2)] *
           ex[arith::mulmod(lm, x, Q)];
  }
  return acc / std::sqrt((double)Q);
}

// CRT factorization: zero unless (l, s1* s2*) = 1 and d | l, else
//   sqrt(d) T_{k+1}(v1 l~ s2* r^{k+1} d^{k+2}; s1*)
//           T_{k+1}(v2 l~ s1* r^{k+1} d^{k+2}; s2*)
//           KK_k(v1 s1*^{k+1} s2*, v2 s1* s2*^{k+1}, l/d; r d, 1, 1)
inline cplx kk_factored(const KKParams& P, int k) {
  P.validate();
  u64 Q = P.product();
  if (std::gcd(arith::mulmod(P.v1 % Q, P.v2 % Q, Q), Q) != 1)
    throw std::invalid_argument("kk_factored requires unit v1 v2");
  u64 d = P.d(), s1s = P.s1_star(), s2s = P.s2_star();
  u64 la = (u64)std::llabs(P.ell);
  if (P.ell % (i64)d != 0) return {0.0, 0.0};
  if (std::gcd(la % (s1s * s2s), s1s * s2s) != 1 && s1s * s2s > 1)
    return {0.0, 0.0};

  auto tfac = [&](u64 v, u64 linv, u64 other_s, u64 mod) {
    u64 arg = v % mod * linv % mod * (other_s % mod) % mod *
              arith::powmod(P.r.value % mod, (u64)(k + 1), mod) % mod *
              arith::powmod(d % mod, (u64)(k + 2), mod) % mod;
    return t_k_prime_factored(arg, arith::factorize(mod), k + 1).value;
  };
  // l inverse taken mod s1* and mod s2* separately; sign of l matters
  auto inv_of_ell = [&](u64 mod) {
    if (mod == 1) return (u64)0;
    u64 lm = (u64)(((P.ell % (i64)mod) + (i64)mod) % (i64)mod);
    return arith::inv_mod(lm, mod);
  };
  cplx f1 = tfac(P.v1, inv_of_ell(s1s), s2s, s1s);
  cplx f2 = tfac(P.v2, inv_of_ell(s2s), s1s, s2s);

  KKParams inner;
  u64 rd = P.r.value * d;
  inner.v1 = P.v1 % rd * arith::powmod(s1s % rd, (u64)(k + 1), rd) % rd *
             (s2s % rd) % rd;
  inner.v2 = P.v2 % rd * (s1s % rd) % rd *
             arith::powmod(s2s % rd, (u64)(k + 1), rd) % rd;
  inner.ell = P.ell / (i64)d;
  inner.r = arith::factorize(rd);
  inner.s1 = arith::factorize(1);
  inner.s2 = arith::factorize(1);
  return std::sqrt((double)d) * f1 * f2 * kk_brute(inner, k);
}

// KK_4(v, v, 0; r, s, s) collapses to (1/sqrt r) sum over units mod rs of
// |T_4(v x; r s)|^2; nonnegative real, at most sqrt(r) s.
inline double kk_diagonal(u64 v, const Factored& r, const Factored& s) {
  if (std::gcd(r.value, s.value) != 1)
    throw std::invalid_argument("kk_diagonal requires gcd(r, s) = 1");
  u64 m = r.value * s.value;
  if (m > kBruteKKCap) throw std::length_error("kk_diagonal budget");
  auto T = t_k_array(arith::factorize(m), 4);
  double acc = 0.0;
  for (u64 x = 0; x < m; ++x) {
    if (std::gcd(x, m) != 1) continue;
    acc += std::norm(T[arith::mulmod(v % m, x, m)]);
  }
  return acc / std::sqrt((double)r.value);
}

// ---------------------------------------------------------------------------
// root-number transform
//
// Provider requirements: conductor() -> u64, c_pi() -> cplx, and
// w(q) -> cplx (central character; identically 1 for the shipped
// representations).

template <class Provider>
cplx root_number_of(const Provider& pi, const dirichlet::CharacterGroup& G,
                    const dirichlet::Character& chi) {
  u64 q = G.q();
  cplx t = dirichlet::gauss_sum_assembled(chi) / std::sqrt((double)q);
  cplx t4 = t * t * t * t;
  return pi.c_pi() * pi.w(q) * G.eval(chi, pi.conductor() % q) * t4;
}

// E_pi(m; q) = sum_{chi primitive mod q} eps(pi, chi) conj(chi)(m),
// evaluated as the brute character sum and as the closed form
// sqrt(q) c_pi w(q) T_4(N m~; q); both must agree.
template <class Provider>
cplx e_pi_transform(u64 m, const Factored& q, const Provider& pi) {
  if (std::gcd(q.value, pi.conductor()) != 1)
    throw std::invalid_argument("e_pi_transform requires gcd(q, N) = 1");
  if (q.value == 1) return pi.c_pi();
  if (std::gcd(m % q.value, q.value) != 1) return {0.0, 0.0};

  dirichlet::CharacterGroup G(q);
  cplx brute{0.0, 0.0};
  for (u64 idx : G.primitive_indices()) {
    auto chi = G.character(idx);
    auto bar = G.character(G.conjugate_index(idx));
    brute += root_number_of(pi, G, chi) * G.eval(bar, m);
  }
  u64 arg = pi.conductor() % q.value *
            arith::inv_mod(m % q.value, q.value) % q.value;
  cplx formula = std::sqrt((double)q.value) * pi.c_pi() * pi.w(q.value) *
                 t_k_prime_factored(arg, q, 4).value;
  if (std::abs(brute - formula) > 1e-6 * (double)q.value)
    throw std::runtime_error("root-number transform: route mismatch");
  return formula;
}

// ---------------------------------------------------------------------------
// Poisson self-check
//
// For V smooth and compactly supported in (0, inf):
//   sum_m V(m/M) e(a m / q)  =  M sum_l Vhat(M (a/q - l)),
// with Vhat(t) = int V(u) e(t u) du.  Returns the absolute discrepancy.

struct WindowFn {
  std::function<double(double)> f;
  double lo = 0.01, hi = 100.0;  // support bounds
};

inline cplx window_fourier(const WindowFn& V, double t) {
  // Equal-step trapezoid.  For a window vanishing to high order at the
  // ends of its support the only quadrature error is aliasing at
  // frequency ~ n/(hi-lo), i.e. spectrally small as long as that rate
  // stays far above |t|.
  int n = 1 << 16;
  double cycles = std::abs(t) * (V.hi - V.lo);
  while (n < 8.0 * cycles && n < (1 << 20)) n <<= 1;
  double h = (V.hi - V.lo) / n;
  cplx acc{0.0, 0.0};
  for (int i = 0; i <= n; ++i) {
    double u = V.lo + i * h;
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    double th = 2.0 * std::numbers::pi * t * u;
    acc += w * V.f(u) * cplx{std::cos(th), std::sin(th)};
  }
  return acc * h;
}

inline double poisson_check(const WindowFn& V, double M, u64 q, u64 a) {
  cplx lhs{0.0, 0.0};
  for (u64 m = (u64)std::floor(V.lo * M); m <= (u64)std::ceil(V.hi * M); ++m) {
    if (m == 0) continue;
    double th = 2.0 * std::numbers::pi * (double)(a % q) * (double)(m % q) /
                (double)q;
    lhs += V.f((double)m / M) * cplx{std::cos(th), std::sin(th)};
  }
  // dual side: l walks outward from a/q until the transform is dead
  cplx rhs{0.0, 0.0};
  i64 l0 = (i64)std::llround((double)a / (double)q);
  for (int dir : {+1, -1}) {
    for (int step = (dir > 0 ? 0 : 1); step <= 64; ++step) {
      i64 l = l0 + dir * step;
      cplx term = M * window_fourier(V, M * ((double)a / (double)q - (double)l));
      rhs += term;
      if (step >= 3 && std::abs(term) < 1e-10) break;
    }
  }
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// bilinear forms in inverse fractions

struct BilinearResult {
  cplx value{0.0, 0.0};
  double envelope = 0.0;  // DFI-shaped envelope
  double ratio = 0.0;     // |value| / envelope
};

// sum over m in [M, M+len_a), n in [N, N+len_b), gcd(m, n) = 1 of
// alpha_m beta_n e(l m~ / n) F(m, n), with m~ the inverse of m mod n.
inline BilinearResult dfi_bilinear(const std::vector<cplx>& alpha, u64 M,
                                   const std::vector<cplx>& beta, u64 N,
                                   i64 ell,
                                   const std::function<double(u64, u64)>& F) {
  if ((double)alpha.size() * (double)beta.size() > kNestedLoopCap)
    throw std::length_error("dfi_bilinear budget");
  cplx acc{0.0, 0.0};
  double na = 0.0, nb = 0.0;
  for (auto& a : alpha) na += std::norm(a);
  for (auto& b : beta) nb += std::norm(b);
  for (u64 j = 0; j < beta.size(); ++j) {
    u64 n = N + j;
    if (n == 0) continue;
    auto ex = unit_circle_table(n);
    u64 lm = (u64)(((ell % (i64)n) + (i64)n) % (i64)n);
    for (u64 i = 0; i < alpha.size(); ++i) {
      u64 m = M + i;
      if (std::gcd(m, n) != 1) continue;
      u64 minv = n == 1 ? 0 : arith::inv_mod(m % n, n);
      acc += alpha[i] * beta[j] * ex[arith::mulmod(lm, minv, n)] * F(m, n);
    }
  }
  BilinearResult r;
  r.value = acc;
  double Mlen = (double)alpha.size(), Nlen = (double)beta.size();
  r.envelope = std::sqrt(na) * std::sqrt(nb) *
               std::pow(std::abs((double)ell) + Mlen * Nlen, 3.0 / 8.0) *
               std::pow(Mlen + Nlen, 11.0 / 48.0);
  r.ratio = r.envelope > 0 ? std::abs(acc) / r.envelope : 0.0;
  return r;
}

}  // namespace charsum::expsums
