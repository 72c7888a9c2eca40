#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "charsum/expsums.hpp"
#include "oracle_helpers.hpp"

using namespace charsum;
using namespace charsum::expsums;
using oracle::e_at;

namespace {

// literal-definition oracle for T_k, built on the O(q) Gauss sum
cplx t_k_oracle(u64 ell, u64 q, int k) {
  if (q == 1) return {1.0, 0.0};
  dirichlet::CharacterGroup G(arith::factorize(q));
  double rq = std::sqrt((double)q);
  cplx acc{0.0, 0.0};
  for (u64 idx : G.primitive_indices()) {
    auto chi = G.character(idx);
    cplx t = dirichlet::gauss_sum(chi) / rq, pw{1.0, 0.0};
    for (int j = 0; j < k; ++j) pw *= t;
    acc += pw * G.eval(chi, ell);
  }
  return acc / rq;
}

// literal-definition oracle for KK_k on tiny moduli
cplx kk_oracle(u64 v1, u64 v2, i64 ell, u64 r, u64 s1, u64 s2, int k) {
  u64 Q = r * s1 * s2;
  cplx acc{0.0, 0.0};
  for (u64 x = 1; x <= Q; ++x) {
    if (std::gcd(x % Q, Q) != 1) continue;
    double frac =
        (double)((((ell % (i64)Q) + (i64)Q) % (i64)Q) * (i64)(x % Q) % (i64)Q) /
        (double)Q;
    acc += t_k_oracle(v1 * x % (r * s1), r * s1, k) *
           t_k_oracle(v2 * x % (r * s2), r * s2, k) * e_at(frac);
  }
  return acc / std::sqrt((double)Q);
}

u64 rand_squarefree(std::mt19937_64& rng, u64 lo, u64 hi) {
  while (true) {
    u64 q = rng() % (hi - lo + 1) + lo;
    if (arith::factorize(q).is_squarefree()) return q;
  }
}

struct TrivialProvider {
  u64 conductor() const { return 1; }
  cplx c_pi() const { return {1.0, 0.0}; }
  cplx w(u64) const { return {1.0, 0.0}; }
};

struct ShiftedProvider {
  u64 conductor() const { return 3; }
  cplx c_pi() const { return {0.0, 1.0}; }
  cplx w(u64) const { return {1.0, 0.0}; }
};

}  // namespace

TEST_CASE("pinned T_k values") {
  REQUIRE(t_k_brute(1, arith::factorize(1), 4).value == cplx{1.0, 0.0});
  auto v = t_k_brute(1, arith::factorize(3), 2).value;
  REQUIRE(std::abs(v - cplx{-1.0 / std::sqrt(3.0), 0.0}) < 1e-12);
  REQUIRE(t_k_brute(3, arith::factorize(3), 4).value == cplx{0.0, 0.0});
  REQUIRE_THROWS_AS(t_k_brute(1, arith::factorize(12), 2), std::domain_error);
  REQUIRE_THROWS_AS(t_k_brute(1, arith::factorize(3), 0),
                    std::invalid_argument);
}

TEST_CASE("T_k brute matches the literal oracle") {
  for (u64 q : {1ull, 2ull, 3ull, 5ull, 15ull, 21ull, 35ull})
    for (int k = 1; k <= 4; ++k)
      for (u64 ell = 1; ell <= q; ++ell) {
        cplx lib = t_k_brute(ell, arith::factorize(q), k).value;
        REQUIRE(std::abs(lib - t_k_oracle(ell % q, q, k)) < 1e-10);
      }
}

TEST_CASE("prime tables, full peel, and brute all agree") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    u64 q = rand_squarefree(rng, 2, 700);
    auto f = arith::factorize(q);
    auto arr4 = t_k_array(f, 4);
    for (int k : {2, 3, 4}) {
      u64 ell = rng() % q;
      cplx a = t_k_brute(ell, f, k).value;
      cplx b = t_k_prime_factored(ell, f, k).value;
      REQUIRE(std::abs(a - b) < 1e-9);
      if (k == 4) REQUIRE(std::abs(arr4[ell] - a) < 1e-9);
    }
  }
}

TEST_CASE("coprime-split identity for T_k") {
  // pinned instance: T_2(1; 15) = T_2(9; 5) T_2(25; 3)
  cplx lhs = t_k_brute(1, arith::factorize(15), 2).value;
  cplx rhs = t_k_brute(9, arith::factorize(5), 2).value *
             t_k_brute(25 % 3, arith::factorize(3), 2).value;
  REQUIRE(std::abs(lhs - rhs) < 1e-12);

  cplx f21 = t_k_factored(2, arith::factorize(3), arith::factorize(7), 4).value;
  REQUIRE(std::abs(f21 - t_k_brute(2, arith::factorize(21), 4).value) < 1e-9);

  REQUIRE_THROWS_AS(t_k_factored(1, arith::factorize(6), arith::factorize(10), 2),
                    std::invalid_argument);

  std::mt19937_64 rng(1031);
  int done = 0;
  while (done < 60) {
    u64 r = rand_squarefree(rng, 2, 60), s = rand_squarefree(rng, 2, 60);
    if (std::gcd(r, s) != 1) continue;
    u64 m = rng() % (r * s) + 1;
    for (int k : {2, 3, 4}) {
      cplx a = t_k_factored(m, arith::factorize(r), arith::factorize(s), k).value;
      cplx b = t_k_brute(m, arith::factorize(r * s), k).value;
      REQUIRE(std::abs(a - b) < 1e-8);
    }
    ++done;
  }
}

TEST_CASE("even-k transforms are real, prime envelope holds") {
  for (u64 p : arith::primes_up_to(200)) {
    if (p == 2) continue;
    for (int k : {2, 3, 4}) {
      for (u64 v = 1; v < p; ++v) {
        cplx t = t_k_prime_factored(v, arith::factorize(p), k).value;
        if (k % 2 == 0) REQUIRE(std::abs(t.imag()) < 1e-9);
        REQUIRE(std::abs(t) <= (double)k + 1.0);
      }
    }
  }
}

TEST_CASE("hyper-Kloosterman pinned values and route agreement") {
  REQUIRE(std::abs(hyper_kloosterman(1, 5, 2) - cplx{0.1708203932499369, 0.0}) <
          1e-12);
  REQUIRE(std::abs(hyper_kloosterman(1, 2, 2) - cplx{1.0 / std::sqrt(2.0), 0.0}) <
          1e-12);
  REQUIRE_THROWS_AS(hyper_kloosterman(5, 5, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(hyper_kloosterman(1, 5, 9), std::invalid_argument);

  // convolution oracle written out longhand, against the nested loop
  for (u64 p : {11ull, 31ull, 61ull}) {
    auto ex = unit_circle_table(p);
    std::vector<cplx> S(p, cplx{0, 0});
    for (u64 v = 1; v < p; ++v) S[v] = ex[v];
    for (int k = 2; k <= 4; ++k) {
      std::vector<cplx> next(p, cplx{0, 0});
      for (u64 v = 1; v < p; ++v)
        for (u64 t = 1; t < p; ++t)
          next[v] += S[arith::mulmod(v, arith::inv_mod(t, p), p)] * ex[t];
      S = next;
      double norm = std::pow((double)p, (k - 1) / 2.0);
      for (u64 u : {(u64)1, (u64)2, p - 1}) {
        REQUIRE(std::abs(hyper_kloosterman(u, p, k) - S[u] / norm) < 1e-10);
      }
    }
  }

  // Deligne envelope on a sample of primes
  std::mt19937_64 rng(5);
  for (u64 p : arith::primes_up_to(500)) {
    if (p < 5) continue;
    for (int k : {2, 3, 4}) {
      for (int t = 0; t < 5; ++t) {
        u64 u = rng() % (p - 1) + 1;
        REQUIRE(std::abs(hyper_kloosterman(u, p, k)) <= (double)k);
      }
    }
  }
}

TEST_CASE("prime-level relation between T_k and K_k") {
  for (auto [v, p, k] : {std::tuple<u64, u64, int>{1, 5, 4},
                         std::tuple<u64, u64, int>{2, 7, 2}}) {
    cplx a = t_k_via_kloosterman(v, p, k).value;
    cplx b = t_k_brute(v, arith::factorize(p), k).value;
    REQUIRE(std::abs(a - b) < 1e-9);
  }
  REQUIRE(t_k_via_kloosterman(10, 5, 4).value == cplx{0.0, 0.0});

  std::mt19937_64 rng(17);
  for (u64 p : arith::primes_up_to(200)) {
    if (p == 2) continue;
    u64 v = rng() % (p - 1) + 1;
    for (int k : {2, 3, 4}) {
      cplx a = t_k_via_kloosterman(v, p, k).value;
      cplx b = t_k_brute(v, arith::factorize(p), k).value;
      REQUIRE(std::abs(a - b) < 1e-8);
    }
  }
}

TEST_CASE("KK brute: pinned values and oracle") {
  KKParams triv;
  triv.r = triv.s1 = triv.s2 = arith::factorize(1);
  REQUIRE(std::abs(kk_brute(triv, 4) - cplx{1.0, 0.0}) < 1e-12);

  KKParams diag33;
  diag33.v1 = diag33.v2 = 1;
  diag33.ell = 0;
  diag33.r = arith::factorize(1);
  diag33.s1 = diag33.s2 = arith::factorize(3);
  // six units mod 9, each term 1/3, prefactor 1/3
  REQUIRE(std::abs(kk_brute(diag33, 4) - cplx{2.0 / 3.0, 0.0}) < 1e-12);

  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    KKParams P;
    P.r = arith::factorize(rand_squarefree(rng, 1, 6));
    P.s1 = arith::factorize(rand_squarefree(rng, 1, 8));
    P.s2 = arith::factorize(rand_squarefree(rng, 1, 8));
    if (std::gcd(P.r.value, P.s1.value * P.s2.value) != 1) continue;
    P.v1 = rng() % 10 + 1;
    P.v2 = rng() % 10 + 1;
    P.ell = (i64)(rng() % 9) - 4;
    cplx lib = kk_brute(P, 4);
    cplx orc = kk_oracle(P.v1, P.v2, P.ell, P.r.value, P.s1.value, P.s2.value, 4);
    REQUIRE(std::abs(lib - orc) < 1e-9);
  }

  KKParams big;
  big.r = arith::factorize(101);
  big.s1 = arith::factorize(1003);
  big.s2 = arith::factorize(1005);
  REQUIRE_THROWS_AS(kk_brute(big, 4), std::length_error);
}

TEST_CASE("KK factorization matches brute") {
  auto check = [](u64 v1, u64 v2, i64 ell, u64 r, u64 s1, u64 s2, int k) {
    KKParams P;
    P.v1 = v1;
    P.v2 = v2;
    P.ell = ell;
    P.r = arith::factorize(r);
    P.s1 = arith::factorize(s1);
    P.s2 = arith::factorize(s2);
    cplx a = kk_factored(P, k);
    cplx b = kk_brute(P, k);
    REQUIRE(std::abs(a - b) < 1e-7);
    return a;
  };

  check(1, 1, 1, 3, 5, 7, 4);   // d = 1, all parts live
  check(1, 2, 5, 1, 15, 5, 4);  // d = 5 divides ell
  check(1, 1, 0, 2, 3, 3, 4);   // ell = 0, s1 = s2 = d
  check(1, 1, 3, 1, 2, 2, 4);   // even moduli: both sides vanish
  REQUIRE(check(1, 1, 3, 5, 2, 6, 4) == cplx{0.0, 0.0});   // d=2 does not divide 3
  REQUIRE(check(1, 1, 5, 3, 5, 10, 4) == cplx{0.0, 0.0});  // gcd(ell, s1* s2*) > 1

  KKParams bad;
  bad.v1 = 3;
  bad.v2 = 1;
  bad.r = arith::factorize(3);
  bad.s1 = arith::factorize(5);
  bad.s2 = arith::factorize(7);
  REQUIRE_THROWS_AS(kk_factored(bad, 4), std::invalid_argument);

  std::mt19937_64 rng(4242);
  int done = 0;
  while (done < 30) {
    KKParams P;
    P.r = arith::factorize(rand_squarefree(rng, 1, 10));
    P.s1 = arith::factorize(rand_squarefree(rng, 1, 30));
    P.s2 = arith::factorize(rand_squarefree(rng, 1, 30));
    if (std::gcd(P.r.value, P.s1.value * P.s2.value) != 1) continue;
    if (P.product() > 5000) continue;
    u64 Q = P.product();
    P.v1 = rng() % Q + 1;
    P.v2 = rng() % Q + 1;
    if (std::gcd(P.v1 % Q * (P.v2 % Q) % Q, Q) != 1) continue;
    P.ell = (i64)(rng() % 41) - 20;
    for (int k : {3, 4})
      REQUIRE(std::abs(kk_factored(P, k) - kk_brute(P, k)) < 1e-7);
    ++done;
  }
}

TEST_CASE("diagonal KK values") {
  REQUIRE(kk_diagonal(1, arith::factorize(1), arith::factorize(1)) == 1.0);

  auto phistar = [](u64 m) {
    return (double)dirichlet::primitive_count(arith::factorize(m));
  };
  std::mt19937_64 rng(99);
  int done = 0;
  while (done < 25) {
    u64 r = rand_squarefree(rng, 1, 20), s = rand_squarefree(rng, 1, 20);
    if (std::gcd(r, s) != 1) continue;
    u64 v = rng() % (r * s) + 1;
    double val = kk_diagonal(v, arith::factorize(r), arith::factorize(s));
    REQUIRE(val >= -1e-12);
    REQUIRE(val <= std::sqrt((double)r) * (double)s + 1e-9);
    if (std::gcd(v, r * s) == 1) {
      // closed form (1/sqrt r)(phi(rs)/rs) phi*(rs)
      double m = (double)(r * s);
      double closed = (1.0 / std::sqrt((double)r)) *
                      ((double)arith::euler_phi(r * s) / m) * phistar(r * s);
      REQUIRE(std::abs(val - closed) < 1e-9 * (1.0 + closed));
    }
    // agreement with the generic paired sum when the budget allows
    if (r * s * s <= 20000) {
      KKParams P;
      P.v1 = P.v2 = v;
      P.ell = 0;
      P.r = arith::factorize(r);
      P.s1 = P.s2 = arith::factorize(s);
      cplx generic = kk_brute(P, 4);
      REQUIRE(std::abs(generic.imag()) < 1e-9);
      REQUIRE(std::abs(generic.real() - val) < 1e-9 * (1.0 + val));
    }
    ++done;
  }
}

TEST_CASE("root-number transform dual evaluation") {
  TrivialProvider triv;
  REQUIRE(e_pi_transform(1, arith::factorize(1), triv) == cplx{1.0, 0.0});
  REQUIRE(e_pi_transform(5, arith::factorize(15), triv) == cplx{0.0, 0.0});

  std::mt19937_64 rng(303);
  for (u64 q : {3ull, 5ull, 7ull, 15ull, 21ull, 33ull, 35ull, 55ull}) {
    for (int t = 0; t < 5; ++t) {
      u64 m = rng() % (3 * q) + 1;
      if (std::gcd(m % q, q) != 1) continue;
      e_pi_transform(m, arith::factorize(q), triv);  // throws on mismatch
    }
  }

  ShiftedProvider pi3;
  REQUIRE_THROWS_AS(e_pi_transform(1, arith::factorize(15), pi3),
                    std::invalid_argument);
  for (u64 q : {5ull, 7ull, 35ull, 55ull})
    e_pi_transform(2, arith::factorize(q), pi3);
}

TEST_CASE("Poisson summation self-check") {
  WindowFn V;
  V.lo = 0.25;
  V.hi = 4.0;
  V.f = [](double u) {
    if (u <= 0.25 || u >= 4.0) return 0.0;
    return std::exp(-1.0 / (u - 0.25) - 1.0 / (4.0 - u));
  };
  REQUIRE(poisson_check(V, 50.0, 1, 0) < 1e-6);
  REQUIRE(poisson_check(V, 100.0, 7, 3) < 1e-6);
  REQUIRE(poisson_check(V, 1000.0, 97, 5) < 1e-6);
}

TEST_CASE("bilinear form in inverse fractions") {
  auto Fone = [](u64, u64) { return 1.0; };

  // single-term sequences: |sum| = |F|
  std::vector<cplx> one{cplx{1.0, 0.0}};
  auto single = dfi_bilinear(one, 7, one, 9, 3, [](u64, u64) { return 2.5; });
  REQUIRE(std::abs(std::abs(single.value) - 2.5) < 1e-12);

  // flat sequences vs an independent longhand loop
  std::vector<cplx> a(10, cplx{1.0, 0.0}), b(10, cplx{1.0, 0.0});
  auto lib = dfi_bilinear(a, 10, b, 10, 1, Fone);
  cplx orc{0.0, 0.0};
  for (u64 m = 10; m < 20; ++m)
    for (u64 n = 10; n < 20; ++n) {
      if (std::gcd(m, n) != 1) continue;
      u64 minv = 1;
      while (minv * m % n != 1) ++minv;  // brute inverse
      orc += e_at((double)minv / (double)n);
    }
  REQUIRE(std::abs(lib.value - orc) < 1e-10);

  // random signs: far below the bilinear envelope
  std::mt19937_64 rng(8080);
  std::vector<cplx> ra(100), rb(100);
  for (auto& z : ra) z = {rng() % 2 ? 1.0 : -1.0, 0.0};
  for (auto& z : rb) z = {rng() % 2 ? 1.0 : -1.0, 0.0};
  auto res = dfi_bilinear(ra, 100, rb, 100, 1, Fone);
  REQUIRE(res.ratio < 1.0);
}
