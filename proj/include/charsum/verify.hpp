#pragma once
// Cross-cutting verification harness: every brute-vs-factored oracle pair,
// bound check, and identity from the component modules, run over seeded
// grids and collected into one pass/fail ledger.  Checks are independent and
// run in parallel; the ledger is assembled in check-id order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "charsum/census.hpp"

namespace charsum::verify {

using arith::Factored;
using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

enum class GridScale { kQuick, kFull };

inline const char* scale_name(GridScale s) {
  return s == GridScale::kQuick ? "quick" : "full";
}

struct CheckResult {
  std::string id;
  std::string grid;       // what was actually swept, for replay
  double worst = 0.0;     // worst-case discrepancy over the grid
  double tolerance = 0.0;
  double slack = 0.0;     // tolerance - worst
  bool pass = false;      // pass iff worst <= tolerance
  u64 seed = 0;           // rng seed used for the random part of the grid
};

struct Ledger {
  GridScale scale = GridScale::kQuick;
  std::vector<CheckResult> results;  // ascending by check id
  bool pass = true;
};

namespace detail {

struct Ctx {
  GridScale scale;
  std::mt19937_64 rng;
  std::string grid;
  bool quick() const { return scale == GridScale::kQuick; }
  u64 pick(u64 lo, u64 hi) {  // inclusive range
    return std::uniform_int_distribution<u64>(lo, hi)(rng);
  }
};

using CheckFn = double (*)(Ctx&);

struct CheckDef {
  const char* id;
  double tol;
  CheckFn fn;
};

inline std::vector<u64> squarefree_up_to(u64 cap, u64 coprime_to = 1) {
  std::vector<u64> out;
  for (u64 q = 2; q <= cap; ++q) {
    if (std::gcd(q, coprime_to) != 1) continue;
    if (arith::factorize(q).is_squarefree()) out.push_back(q);
  }
  return out;
}

// The toy census profiles used by the census checks; these match the shipped
// small profiles parameter for parameter.
inline moduli::ModuliProfile toy_profile(u64 f) {
  moduli::ModuliProfile P;
  P.Q = 10;
  P.p1 = 2;
  P.p2 = 5;
  P.z = 11;
  P.max_omega = 0;
  P.f = f;
  moduli::validate_profile(P);
  return P;
}

// --------------------------------------------------------------------------
// arith

inline double check_factorize_roundtrip(Ctx& c) {
  u64 cap = c.quick() ? 100000 : 1000000;
  c.grid = "n <= " + std::to_string(cap) + ", product and flag recheck";
  double worst = 0.0;
  for (u64 n = 1; n <= cap; ++n) {
    auto F = arith::factorize(n);
    u64 prod = 1;
    for (auto& [p, e] : F.factors)
      for (int j = 0; j < e; ++j) prod *= p;
    if (prod != n) worst = std::max(worst, 1.0);
  }
  return worst;
}

inline double check_crt_roundtrip(Ctx& c) {
  int trials = c.quick() ? 300 : 2000;
  c.grid = std::to_string(trials) + " random coprime (r, s) <= 10^4";
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    u64 r = c.pick(2, 10000), s = c.pick(2, 10000);
    if (std::gcd(r, s) != 1) continue;
    u64 x = c.pick(0, r * s - 1);
    auto [a, b] = arith::crt_split(arith::Residue{x, r * s}, r, s);
    u64 back = arith::crt_combine(a, b).value;
    worst = std::max(worst, (double)(back > x ? back - x : x - back));
  }
  return worst;
}

inline double check_units_count(Ctx& c) {
  u64 cap = c.quick() ? 500 : 2000;
  c.grid = "q <= " + std::to_string(cap);
  double worst = 0.0;
  for (u64 q = 1; q <= cap; ++q) {
    u64 phi = arith::factorize(q).phi();
    worst = std::max(
        worst, std::abs((double)arith::units(q).size() - (double)phi));
  }
  return worst;
}

// --------------------------------------------------------------------------
// dirichlet

inline double check_eval_multiplicative(Ctx& c) {
  int groups = c.quick() ? 8 : 25;
  c.grid = std::to_string(groups) + " squarefree groups, 40 products each";
  auto qs = squarefree_up_to(300);
  double worst = 0.0;
  for (int g = 0; g < groups; ++g) {
    u64 q = qs[c.pick(0, qs.size() - 1)];
    dirichlet::CharacterGroup G(arith::factorize(q));
    for (int t = 0; t < 40; ++t) {
      auto chi = G.character(c.pick(0, G.size() - 1));
      u64 m = c.pick(0, 3 * q), n = c.pick(0, 3 * q);
      cplx lhs = G.eval(chi, m * n);
      cplx rhs = G.eval(chi, m) * G.eval(chi, n);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

inline double check_gauss_modulus(Ctx& c) {
  u64 cap = c.quick() ? 120 : 500;
  c.grid = "all primitive chi, squarefree q <= " + std::to_string(cap);
  double worst = 0.0;
  for (u64 q : squarefree_up_to(cap)) {
    dirichlet::CharacterGroup G(arith::factorize(q));
    for (u64 idx : G.primitive_indices()) {
      cplx t = dirichlet::gauss_sum_assembled(G.character(idx));
      worst = std::max(worst, std::abs(std::norm(t) - (double)q) / (double)q);
    }
  }
  return worst;
}

inline double check_gauss_twisted_mult(Ctx& c) {
  int trials = c.quick() ? 50 : 200;
  c.grid = std::to_string(trials) + " random coprime (r, s) <= 100";
  auto qs = squarefree_up_to(100);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    u64 r = qs[c.pick(0, qs.size() - 1)];
    u64 s = qs[c.pick(0, qs.size() - 1)];
    if (std::gcd(r, s) != 1) continue;
    dirichlet::CharacterGroup Gr(arith::factorize(r));
    dirichlet::CharacterGroup Gs(arith::factorize(s));
    auto psi = Gr.character(c.pick(0, Gr.size() - 1));
    auto nu = Gs.character(c.pick(0, Gs.size() - 1));
    // tau(psi nu) summed directly mod rs against the split closed form
    cplx direct{0.0, 0.0};
    double ang = 2.0 * 3.14159265358979323846 / (double)(r * s);
    for (u64 x = 0; x < r * s; ++x) {
      cplx v = Gr.eval(psi, x) * Gs.eval(nu, x);
      if (v != cplx{0.0, 0.0})
        v *= cplx{std::cos(ang * (double)x), std::sin(ang * (double)x)};
      direct += v;
    }
    cplx split = dirichlet::gauss_sum(psi) * dirichlet::gauss_sum(nu) *
                 Gs.eval(nu, r) * Gr.eval(psi, s);
    worst = std::max(worst, std::abs(direct - split));
  }
  return worst;
}

inline double check_primitive_count(Ctx& c) {
  u64 cap = c.quick() ? 300 : 2000;
  c.grid = "squarefree q <= " + std::to_string(cap);
  double worst = 0.0;
  for (u64 q : squarefree_up_to(cap)) {
    auto F = arith::factorize(q);
    dirichlet::CharacterGroup G(F);
    i64 divisor_side = dirichlet::primitive_char_sum_divisor_side(F, 1 % q);
    double diff = std::abs((double)G.primitive_indices().size() -
                           (double)divisor_side);
    worst = std::max(worst, diff);
  }
  return worst;
}

// --------------------------------------------------------------------------
// expsums

inline double check_tk_factored_vs_brute(Ctx& c) {
  int trials = c.quick() ? 60 : 500;
  c.grid = std::to_string(trials) +
           " random squarefree coprime (r, s), r s <= 10^4, k in {2,3,4}";
  auto qs = squarefree_up_to(200);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    u64 r = qs[c.pick(0, qs.size() - 1)];
    u64 s = qs[c.pick(0, qs.size() - 1)];
    if (std::gcd(r, s) != 1 || r * s > 10000) continue;
    int k = 2 + (int)c.pick(0, 2);
    u64 rs = r * s;
    u64 ell = c.pick(1, rs);
    if (std::gcd(ell % rs, rs) != 1) continue;
    auto fac = expsums::t_k_factored(ell, arith::factorize(r),
                                     arith::factorize(s), k);
    auto bru = expsums::t_k_brute(ell, arith::factorize(rs), k);
    worst = std::max(worst, std::abs(fac.value - bru.value));
  }
  return worst;
}

inline double check_kk_factored_vs_brute(Ctx& c) {
  int trials = c.quick() ? 40 : 200;
  c.grid = std::to_string(trials) +
           " random KK instances, r s1 s2 <= 3*10^4, degenerate corners "
           "included";
  auto qs = squarefree_up_to(60);
  double worst = 0.0;
  auto run = [&](expsums::KKParams& P) {
    if (P.product() > 30000) return;
    if (std::gcd(P.r.value, P.s1.value * P.s2.value) != 1) return;
    if (std::gcd(P.v1, P.product()) != 1 || std::gcd(P.v2, P.product()) != 1)
      return;
    cplx fac = expsums::kk_factored(P, 4);
    cplx bru = expsums::kk_brute(P, 4);
    worst = std::max(worst, std::abs(fac - bru));
  };
  // fixed corners first: shared s, zero shift, equal points, trivial moduli
  for (auto [r, s1, s2, v1, v2, ell] :
       {std::array<i64, 6>{15, 7, 7, 2, 2, 0}, {15, 7, 7, 2, 8, 3},
        {1, 6, 35, 11, 13, 1}, {13, 1, 1, 3, 5, 0}, {33, 14, 7, 5, 5, 7}}) {
    expsums::KKParams P;
    P.r = arith::factorize((u64)r);
    P.s1 = arith::factorize((u64)s1);
    P.s2 = arith::factorize((u64)s2);
    P.v1 = (u64)v1;
    P.v2 = (u64)v2;
    P.ell = ell;
    run(P);
  }
  for (int t = 0; t < trials; ++t) {
    expsums::KKParams P;
    P.r = arith::factorize(qs[c.pick(0, qs.size() - 1)]);
    P.s1 = arith::factorize(qs[c.pick(0, qs.size() - 1)]);
    P.s2 = c.pick(0, 3) == 0 ? P.s1
                             : arith::factorize(qs[c.pick(0, qs.size() - 1)]);
    P.v1 = c.pick(1, 100);
    P.v2 = c.pick(0, 4) == 0 ? P.v1 : c.pick(1, 100);
    P.ell = (i64)c.pick(0, 50) - 25;
    run(P);
  }
  return worst;
}

inline double check_deligne_envelope(Ctx& c) {
  u64 cap = c.quick() ? 120 : 500;
  c.grid = "primes p <= " + std::to_string(cap) +
           ", k in {2,3,4}, 12 units per prime";
  double worst = -1.0;
  for (u64 p : arith::primes_up_to(cap)) {
    for (int k : {2, 3, 4}) {
      for (int t = 0; t < 12; ++t) {
        u64 v = c.pick(1, p - 1);
        double K = std::abs(expsums::hyper_kloosterman(v, p, k));
        worst = std::max(worst, K - (double)k);
        double T = std::abs(
            expsums::t_k_brute(v, arith::factorize(p), k).value);
        worst = std::max(worst, T - (double)(k + 1));
      }
    }
  }
  return worst;
}

inline double check_kk_prime_bound(Ctx& c) {
  u64 cap = c.quick() ? 60 : 200;
  c.grid = "primes p <= " + std::to_string(cap) +
           ", generic and doubly-degenerate branches";
  double worst = -1.0;
  for (u64 p : arith::primes_up_to(cap)) {
    expsums::KKParams P;
    P.r = arith::factorize(p);
    P.s1 = arith::factorize(1);
    P.s2 = arith::factorize(1);
    // generic: empirical constant bound
    P.v1 = c.pick(1, p - 1);
    P.v2 = c.pick(1, p - 1);
    P.ell = (i64)c.pick(1, p - 1);
    worst = std::max(worst, std::abs(expsums::kk_brute(P, 4)) - 20.0);
    // p | ell and p | v1 - v2: the sqrt(p) branch
    P.v2 = P.v1;
    P.ell = 0;
    worst = std::max(worst,
                     std::abs(expsums::kk_brute(P, 4)) - std::sqrt((double)p));
  }
  return worst;
}

inline double check_expsum_reality(Ctx& c) {
  int trials = c.quick() ? 40 : 150;
  c.grid = std::to_string(trials) +
           " draws: Im T_k for even k, Im and sign of diagonal KK_4";
  auto qs = squarefree_up_to(c.quick() ? 200 : 500);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    u64 q = qs[c.pick(0, qs.size() - 1)];
    if (q > expsums::kBruteTCap) continue;
    u64 ell = c.pick(1, q);
    for (int k : {2, 4})
      worst = std::max(
          worst,
          std::abs(expsums::t_k_brute(ell, arith::factorize(q), k)
                       .value.imag()));
  }
  auto small = squarefree_up_to(30);
  for (int t = 0; t < trials; ++t) {
    expsums::KKParams P;
    P.r = arith::factorize(small[c.pick(0, small.size() - 1)]);
    P.s1 = arith::factorize(small[c.pick(0, small.size() - 1)]);
    P.s2 = P.s1;
    if (P.product() > 30000) continue;
    if (std::gcd(P.r.value, P.s1.value) != 1) continue;
    P.v1 = P.v2 = c.pick(1, 50);
    if (std::gcd(P.v1, P.product()) != 1) continue;
    P.ell = 0;
    cplx d = expsums::kk_brute(P, 4);
    worst = std::max(worst, std::abs(d.imag()));
    worst = std::max(worst, -d.real());
  }
  return worst;
}

inline double check_dual_class_consistency(Ctx& c) {
  u64 cap = c.quick() ? 60 : 200;
  c.grid = "squarefree q <= " + std::to_string(cap) + ", 3 units per q";
  const auto& pi = autcoeffs::sym3_delta();
  double worst = 0.0;
  for (u64 q : squarefree_up_to(cap)) {
    auto F = arith::factorize(q);
    dirichlet::CharacterGroup G(F);
    auto prim = G.primitive_indices();
    std::vector<cplx> eps;
    std::vector<dirichlet::Character> bars;
    for (u64 idx : prim) {
      eps.push_back(expsums::root_number_of(pi, G, G.character(idx)));
      bars.push_back(G.character(G.conjugate_index(idx)));
    }
    for (int t = 0; t < 3; ++t) {
      u64 m = c.pick(1, q);
      if (std::gcd(m % q, q) != 1) continue;
      cplx brute{0.0, 0.0};
      for (size_t j = 0; j < prim.size(); ++j)
        brute += eps[j] * G.eval(bars[j], m);
      u64 arg = arith::inv_mod(m % q, q) % q;
      cplx formula = std::sqrt((double)q) * pi.c_pi() * pi.w(q) *
                     expsums::t_k_prime_factored(arg, F, 4).value;
      worst = std::max(worst, std::abs(brute - formula) / (double)q);
    }
  }
  return worst;
}

// --------------------------------------------------------------------------
// autcoeffs

inline const autcoeffs::CoeffProvider& provider_by(int i) {
  return i == 0 ? autcoeffs::sym3_delta() : autcoeffs::rankin_delta_pair();
}

inline double check_lambda_multiplicative(Ctx& c) {
  int trials = c.quick() ? 200 : 1000;
  c.grid = std::to_string(trials) + " coprime pairs per provider, mn free";
  double worst = 0.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    for (int t = 0; t < trials; ++t) {
      u64 m = c.pick(1, 2000), n = c.pick(1, 2000);
      if (std::gcd(m, n) != 1) continue;
      cplx lhs = pi.lambda_at(m * n);
      cplx rhs = pi.lambda_at(m) * pi.lambda_at(n);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

inline double check_newton_roundtrip(Ctx& c) {
  u64 cap = c.quick() ? 40 : 100;
  c.grid = "primes p <= " + std::to_string(cap) +
           ", power sums to depth 6, both providers";
  double worst = 0.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    for (u64 p : arith::primes_up_to(cap)) {
      cplx s[7], e[5];
      for (int l = 1; l <= 6; ++l) s[l] = autcoeffs::power_sum(pi, p, l);
      e[0] = 1.0;
      for (int k = 1; k <= 4; ++k) {
        cplx acc{0.0, 0.0};
        for (int j = 1; j <= k; ++j)
          acc += (j % 2 ? 1.0 : -1.0) * e[k - j] * s[j];
        e[k] = acc / (double)k;
      }
      auto direct = pi.elementary(p);
      for (int k = 1; k <= 4; ++k)
        worst = std::max(worst, std::abs(e[k] - direct[k - 1]));
    }
  }
  return worst;
}

inline double check_satake_self_dual(Ctx& c) {
  u64 cap = c.quick() ? 100 : 500;
  c.grid = "primes p <= " + std::to_string(cap) + ", both providers";
  double worst = 0.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    for (u64 p : arith::primes_up_to(cap)) {
      auto a = pi.satake(p);
      autcoeffs::satake_classify(a, p);  // throws if the multiset is not dual
      for (int i = 0; i < 4; ++i) {
        cplx want = 1.0 / std::conj(a[i]);
        double best = 1e300;
        for (int j = 0; j < 4; ++j)
          best = std::min(best, std::abs(a[j] - want));
        worst = std::max(worst, best / (1.0 + std::abs(want)));
      }
    }
  }
  return worst;
}

inline double check_power_sum_envelope(Ctx& c) {
  u64 cap = c.quick() ? 60 : 200;
  c.grid = "primes p <= " + std::to_string(cap) +
           ", powers to 8, both providers";
  double worst = -1.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    for (u64 p : arith::primes_up_to(cap))
      for (int l = 1; l <= 8; ++l)
        worst = std::max(worst, std::abs(autcoeffs::power_sum(pi, p, l)) -
                                    autcoeffs::power_sum_envelope(p, l));
  }
  return worst;
}

inline double check_exterior_square_bound(Ctx& c) {
  int trials = c.quick() ? 20 : 60;
  c.grid = std::to_string(trials) + " constructed two-pair local parameters";
  double worst = -1.0;
  std::uniform_real_distribution<double> expo(0.02, 0.2), angle(0.0, 3.0);
  for (int t = 0; t < trials; ++t) {
    u64 p = arith::primes_up_to(100)[c.pick(2, 24)];
    double lp = std::log((double)p);
    double tt = expo(c.rng), ss = expo(c.rng);
    if (ss > tt) std::swap(tt, ss);
    if (tt - ss < 1e-3) continue;
    double th1 = angle(c.rng), th2 = angle(c.rng);
    std::array<cplx, 4> a{
        std::polar(std::exp(tt * lp), th1), std::polar(std::exp(-tt * lp), th1),
        std::polar(std::exp(ss * lp), th2),
        std::polar(std::exp(-ss * lp), th2)};
    auto cls = autcoeffs::satake_classify(a, p);
    if (cls.tag != 'c') return 1e300;  // constructed fixture must land in (c)
    double lower = std::pow((double)p, tt + ss) + std::pow((double)p, tt - ss) +
                   std::pow((double)p, -tt + ss) +
                   std::pow((double)p, -tt - ss) - 2.0;
    worst = std::max(
        worst, lower - std::abs(autcoeffs::exterior_square_coeff(a)));
  }
  return worst;
}

// --------------------------------------------------------------------------
// lfun

inline double check_afe_split_stability(Ctx& c) {
  std::vector<u64> qs = c.quick() ? std::vector<u64>{5, 15}
                                  : std::vector<u64>{5, 15, 21, 33};
  c.grid = "both providers, q in {5..33}, split 1 vs 2";
  double worst = 0.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    for (u64 q : qs) {
      auto G = dirichlet::char_group(q);
      lfun::AFEConfig base, doubled;
      doubled.split = 2.0;
      u64 lim =
          (u64)(128.0 * (double)q * (double)q *
                std::sqrt((double)pi.conductor())) +
          2;
      if (lim >= pi.prime_limit()) continue;  // sweep would outrun the data
      auto table = autcoeffs::coeff_table(pi, lim);
      auto rows1 = lfun::l_central_all(pi, G, base, &table);
      auto rows2 = lfun::l_central_all(pi, G, doubled, &table);
      for (size_t i = 0; i < rows1.size(); ++i)
        worst = std::max(worst,
                         std::abs(rows1[i].value - rows2[i].value) /
                             (1.0 + std::abs(rows1[i].value)));
    }
  }
  return worst;
}

inline double check_root_unimodularity(Ctx& c) {
  u64 cap = c.quick() ? 150 : 500;
  c.grid =
      "all primitive chi, squarefree q <= " + std::to_string(cap) +
      ", both providers";
  double worst = 0.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    for (u64 q : squarefree_up_to(cap, pi.conductor())) {
      dirichlet::CharacterGroup G(arith::factorize(q));
      for (u64 idx : G.primitive_indices()) {
        cplx eps = expsums::root_number_of(pi, G, G.character(idx));
        worst = std::max(worst, std::abs(std::abs(eps) - 1.0));
      }
    }
  }
  return worst;
}

inline double check_forward_dual_crosscheck(Ctx& c) {
  std::vector<u64> moduli = c.quick()
                                ? std::vector<u64>{15, 21}
                                : std::vector<u64>{15, 21, 33, 35, 55, 65,
                                                   77, 91};
  c.grid = std::to_string(moduli.size()) +
           " moduli <= 100, bands to 128, both signs";
  const auto& pi = autcoeffs::sym3_delta();
  const auto& W1 = lfun::forward_weight(pi);
  const auto& W2 = lfun::dual_weight(pi);
  auto V = lfun::partition_window();
  double worst = 0.0;
  for (u64 q : moduli) {
    double scale = (double)q * (double)q;
    for (int sign : {+1, -1}) {
      for (double band = 0.5; band <= 128.0; band *= 2.0) {
        auto f = lfun::forward_piece(pi, {q}, sign, band, V, W1, scale, true);
        worst = std::max(worst, std::abs(f.value - f.direct));
        auto d = lfun::dual_piece(pi, {q}, sign, band, V, W2, scale, true);
        worst = std::max(worst, std::abs(d.value - d.direct));
      }
    }
  }
  return worst;
}

inline double check_conjugate_symmetry(Ctx& c) {
  std::vector<u64> qs = c.quick() ? std::vector<u64>{5, 15}
                                  : std::vector<u64>{5, 15, 21, 33};
  c.grid = "self-dual providers, q in {5..33}";
  double worst = 0.0;
  for (int prov = 0; prov < 2; ++prov) {
    const auto& pi = provider_by(prov);
    if (!pi.self_dual()) continue;
    for (u64 q : qs) {
      auto G = dirichlet::char_group(q);
      u64 lim = (u64)(64.0 * (double)q * (double)q *
                      std::sqrt((double)pi.conductor())) +
                2;
      if (lim >= pi.prime_limit()) continue;  // sweep would outrun the data
      auto table = autcoeffs::coeff_table(pi, lim);
      auto rows = lfun::l_central_all(pi, G, {}, &table);
      for (auto& row : rows) {
        u64 bar = G.conjugate_index(row.chi_index);
        for (auto& other : rows)
          if (other.chi_index == bar)
            worst = std::max(
                worst, std::abs(other.value - std::conj(row.value)));
      }
    }
  }
  return worst;
}

inline double check_partition_unity(Ctx& c) {
  c.grid = "dyadic partition window over x in [1, 10^6]";
  return lfun::partition_check(lfun::partition_window());
}

// --------------------------------------------------------------------------
// moduli

inline double check_convolution_multiplicative(Ctx& c) {
  int trials = c.quick() ? 150 : 600;
  c.grid = std::to_string(trials) + " coprime pairs with mn <= 10^4";
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    u64 m = c.pick(1, 100), n = c.pick(1, 100);
    if (std::gcd(m, n) != 1 || m * n > 10000) continue;
    i64 lhs = moduli::mobius_phi_convolution(arith::factorize(m * n));
    i64 rhs = moduli::mobius_phi_convolution(arith::factorize(m)) *
              moduli::mobius_phi_convolution(arith::factorize(n));
    worst = std::max(worst, std::abs((double)(lhs - rhs)));
  }
  return worst;
}

inline double check_member_invariants(Ctx& c) {
  c.grid = "toy profiles plus a mid-size desk profile, re-validated";
  for (u64 f : {(u64)1, (u64)14}) {
    auto S = moduli::build_moduli(toy_profile(f));
    if (S.members.empty()) return 1.0;
    moduli::validate_members(S);  // throws on any violated member invariant
  }
  moduli::ModuliProfile mid;
  mid.Q = 10000;
  mid.p1 = 3;
  mid.p2 = 11;
  mid.z = 30;
  mid.max_omega = 1;
  moduli::validate_profile(mid);
  auto S = moduli::build_moduli(mid);
  if (S.members.empty()) return 1.0;
  moduli::validate_members(S);
  return 0.0;
}

inline double check_reduction_identity(Ctx& c) {
  u64 cap = c.quick() ? 20000 : 100000;
  c.grid = "n <= " + std::to_string(cap) + ", window primes in [11, 97]";
  const auto& pi = autcoeffs::sym3_delta();
  double worst = 0.0;
  for (u64 n = 1; n <= cap; ++n) {
    double r = moduli::reduction_identity_check(pi, n, 11, 97);
    auto F = arith::factorize(n);
    bool sq = true;
    int w = moduli::window_omega(F, 11, 97, sq);
    double scale = 1.0 + ((w >= 1 && sq) ? std::abs(pi.lambda_at(n)) : 0.0);
    worst = std::max(worst, r / scale);
  }
  return worst;
}

inline double check_entropy_bound(Ctx& c) {
  u64 cap = c.quick() ? 80 : 200;
  c.grid = "full (n <= " + std::to_string(cap) + ", 2k <= n) grid";
  double worst = -1.0;
  for (u64 n = 0; n <= cap; ++n)
    for (u64 k = 0; 2 * k <= n; ++k) {
      auto eb = moduli::binomial_entropy_bound((int)n, (int)k);
      double exact = eb.exact.convert_to<double>();
      worst = std::max(worst, (exact - eb.bound) / eb.bound);
    }
  return worst;
}

inline double check_classifier_partition(Ctx& c) {
  u64 cap = c.quick() ? 800 : 3000;
  c.grid = "n <= " + std::to_string(cap) +
           ", window [11, 97], smooth threshold 64";
  double worst = 0.0;
  for (u64 n = 1; n <= cap; ++n) {
    auto tag = moduli::classify_smooth_rough(n, 11, 97, 64);
    // independent re-derivation by trial division
    bool window_prime = false;
    u64 smooth = 1;
    u64 left = n;
    for (u64 p = 2; p * p <= left; ++p)
      while (left % p == 0) {
        left /= p;
        if (p >= 11 && p <= 97) window_prime = true;
        if (p < 11) smooth *= p;
      }
    if (left > 1) {
      if (left >= 11 && left <= 97) window_prime = true;
      if (left < 11) smooth *= left;
    }
    moduli::RoughTag want =
        window_prime ? moduli::RoughTag::kWindowPrime
                     : (smooth > 64 ? moduli::RoughTag::kHeavySmoothPart
                                    : moduli::RoughTag::kExceptional);
    if (tag != want) worst += 1.0;
  }
  return worst;
}

// --------------------------------------------------------------------------
// census

inline double check_census_determinism(Ctx& c) {
  c.grid = "toy four-member profile, two independent runs";
  const auto& pi = autcoeffs::sym3_delta();
  auto a = census::run_census(pi, toy_profile(1));
  auto b = census::run_census(pi, toy_profile(1));
  return census::census_csv(a) == census::census_csv(b) ? 0.0 : 1.0;
}

inline double check_census_parity_partition(Ctx& c) {
  c.grid = "toy four-member profile, even + odd vs both";
  const auto& pi = autcoeffs::sym3_delta();
  auto both = census::run_census(pi, toy_profile(1), census::Parity::kBoth);
  auto even = census::run_census(pi, toy_profile(1), census::Parity::kEven);
  auto odd = census::run_census(pi, toy_profile(1), census::Parity::kOdd);
  if (even.rows.size() + odd.rows.size() != both.rows.size()) return 1.0;
  size_t ie = 0, io = 0;
  double worst = 0.0;
  for (auto& row : both.rows) {
    const census::CensusRow* half = nullptr;
    if (row.lv.parity == 1 && ie < even.rows.size())
      half = &even.rows[ie++];
    else if (row.lv.parity == -1 && io < odd.rows.size())
      half = &odd.rows[io++];
    if (!half || half->lv.q != row.lv.q ||
        half->lv.chi_index != row.lv.chi_index)
      return 1.0;
    worst = std::max(worst, std::abs(half->lv.value - row.lv.value));
  }
  return worst;
}

inline double check_census_mean_recompute(Ctx& c) {
  c.grid = "toy four-member profile, stored sums vs recomputation";
  const auto& pi = autcoeffs::sym3_delta();
  auto rep = census::run_census(pi, toy_profile(1));
  double worst = std::abs(census::mean_value(rep) - rep.sum_plain);
  return std::max(worst,
                  std::abs(census::signed_mean_value(rep) - rep.sum_signed));
}

inline double check_census_pipeline(Ctx& c) {
  c.grid = c.quick() ? "singleton toy profile, both signs"
                     : "singleton and four-member toy profiles, both signs";
  const auto& pi = autcoeffs::sym3_delta();
  double worst = 0.0;
  std::vector<u64> fs = c.quick() ? std::vector<u64>{14}
                                  : std::vector<u64>{14, 1};
  for (u64 f : fs) {
    auto rep = census::pipeline_shape_check(pi, toy_profile(f));
    worst = std::max({worst, rep.plus.rel_err, rep.minus.rel_err,
                      std::abs(rep.minus.main_small_bands)});
  }
  return worst;
}

// --------------------------------------------------------------------------
// registry: one entry per Invariants & Properties bullet across the seven
// component modules (3 arith + 4 dirichlet + 6 expsums + 5 autcoeffs +
// 5 lfun + 5 moduli + 4 census = 32).

inline constexpr CheckDef kChecks[] = {
    {"arith-crt-roundtrip", 0.0, check_crt_roundtrip},
    {"arith-factorize-roundtrip", 0.0, check_factorize_roundtrip},
    {"arith-units-count", 0.0, check_units_count},
    {"autcoeffs-exterior-square-case-c", 1e-9, check_exterior_square_bound},
    {"autcoeffs-lambda-multiplicative", 1e-10, check_lambda_multiplicative},
    {"autcoeffs-newton-roundtrip", 1e-9, check_newton_roundtrip},
    {"autcoeffs-power-sum-envelope", 0.0, check_power_sum_envelope},
    {"autcoeffs-satake-self-dual", 1e-8, check_satake_self_dual},
    {"census-determinism", 0.0, check_census_determinism},
    {"census-mean-recompute", 1e-9, check_census_mean_recompute},
    {"census-parity-partition", 0.0, check_census_parity_partition},
    {"census-pipeline-agreement", 1e-4, check_census_pipeline},
    {"dirichlet-eval-multiplicative", 1e-10, check_eval_multiplicative},
    {"dirichlet-gauss-modulus", 1e-8, check_gauss_modulus},
    {"dirichlet-gauss-twisted-mult", 1e-8, check_gauss_twisted_mult},
    {"dirichlet-primitive-count", 0.0, check_primitive_count},
    {"expsums-deligne-envelope", 1e-9, check_deligne_envelope},
    {"expsums-dual-class-consistency", 1e-6, check_dual_class_consistency},
    {"expsums-kk-factored-vs-brute", 1e-7, check_kk_factored_vs_brute},
    {"expsums-kk-prime-bound", 1e-9, check_kk_prime_bound},
    {"expsums-reality", 1e-9, check_expsum_reality},
    {"expsums-tk-factored-vs-brute", 1e-8, check_tk_factored_vs_brute},
    {"lfun-afe-split-stability", 1e-4, check_afe_split_stability},
    {"lfun-conjugate-symmetry", 1e-6, check_conjugate_symmetry},
    {"lfun-forward-dual-crosscheck", 1e-6, check_forward_dual_crosscheck},
    {"lfun-partition-unity", 1e-10, check_partition_unity},
    {"lfun-root-unimodularity", 1e-6, check_root_unimodularity},
    {"moduli-classifier-partition", 0.0, check_classifier_partition},
    {"moduli-convolution-multiplicative", 0.0,
     check_convolution_multiplicative},
    {"moduli-entropy-bound", 0.0, check_entropy_bound},
    {"moduli-member-invariants", 0.0, check_member_invariants},
    {"moduli-reduction-identity", 1e-9, check_reduction_identity},
};

static_assert(sizeof(kChecks) / sizeof(kChecks[0]) == 32,
              "one check per module invariant bullet");

inline u64 fnv1a(const char* s) {
  u64 h = 14695981039346656037ull;
  for (; *s; ++s) {
    h ^= (unsigned char)*s;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

inline std::vector<std::string> all_check_ids() {
  std::vector<std::string> out;
  for (auto& def : detail::kChecks) out.push_back(def.id);
  std::sort(out.begin(), out.end());
  return out;
}

inline Ledger run_suite(const std::vector<std::string>& selection,
                        GridScale scale) {
  std::vector<const detail::CheckDef*> defs;
  for (auto& id : selection) {
    const detail::CheckDef* found = nullptr;
    for (auto& def : detail::kChecks)
      if (id == def.id) found = &def;
    if (!found) throw std::invalid_argument("unknown check id: " + id);
    defs.push_back(found);
  }
  std::sort(defs.begin(), defs.end(),
            [](auto* a, auto* b) { return std::strcmp(a->id, b->id) < 0; });
  defs.erase(std::unique(defs.begin(), defs.end()), defs.end());

  Ledger ledger;
  ledger.scale = scale;
  ledger.results.resize(defs.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= defs.size()) return;
      const auto& def = *defs[i];
      CheckResult r;
      r.id = def.id;
      r.tolerance = def.tol;
      r.seed = detail::fnv1a(def.id) ^ 0x9e3779b97f4a7c15ull;
      detail::Ctx ctx{scale, std::mt19937_64(r.seed), "", };
      try {
        r.worst = def.fn(ctx);
        r.grid = ctx.grid;
        r.pass = r.worst <= def.tol;
      } catch (const std::exception& e) {
        r.worst = std::numeric_limits<double>::infinity();
        r.grid = ctx.grid + " [aborted: " + e.what() + "]";
        r.pass = false;
      }
      r.slack = def.tol - r.worst;
      ledger.results[i] = std::move(r);
    }
  };

  size_t threads = std::min<size_t>(
      defs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (size_t t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& r : ledger.results) ledger.pass = ledger.pass && r.pass;
  return ledger;
}

inline nlohmann::json ledger_json(const Ledger& ledger) {
  nlohmann::json j;
  j["scale"] = scale_name(ledger.scale);
  j["pass"] = ledger.pass;
  j["checks"] = nlohmann::json::array();
  for (auto& r : ledger.results) {
    nlohmann::json c;
    c["id"] = r.id;
    c["grid"] = r.grid;
    c["worst"] = r.worst;
    c["tolerance"] = r.tolerance;
    c["slack"] = r.slack;
    c["pass"] = r.pass;
    c["seed"] = r.seed;
    j["checks"].push_back(c);
  }
  return j;
}

}  // namespace charsum::verify
