// Acceptance gate: fifteen pinned checks, one line each, exit code equal to
// the number of failures.  Grids and tolerances are fixed here and nowhere
// else; every check drives the public headers the way a caller would.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "charsum/census.hpp"

using namespace charsum;
using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

namespace {

struct Crit {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<u64> squarefree_up_to(u64 cap) {
  std::vector<u64> out;
  for (u64 q = 1; q <= cap; ++q)
    if (arith::factorize(q).is_squarefree()) out.push_back(q);
  return out;
}

u64 random_unit(std::mt19937_64& rng, u64 m) {
  std::uniform_int_distribution<u64> d(1, m > 1 ? m - 1 : 1);
  for (;;) {
    u64 v = d(rng);
    if (std::gcd(v, m) == 1) return v;
  }
}

// 1. character-side sums over primitive characters against the
//    divisor-side closed form, exact in the integers
Crit crit_orthogonality() {
  Crit c;
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (u64 q : squarefree_up_to(2000)) {
    auto F = arith::factorize(q);
    dirichlet::CharacterGroup G(F);
    auto prim = G.primitive_indices();
    for (int t = 0; t < 50; ++t) {
      u64 n = q == 1 ? 1 : random_unit(rng, q);
      cplx side{0.0, 0.0};
      for (u64 idx : prim) side += G.eval(G.character(idx), n);
      i64 divisor = dirichlet::primitive_char_sum_divisor_side(F, n % q);
      worst = std::max(worst, std::abs(side - cplx{(double)divisor, 0.0}));
      c.require(std::llround(side.real()) == divisor,
                "rounded mismatch at q=" + std::to_string(q) +
                    ", n=" + std::to_string(n));
    }
  }
  c.require(worst <= 1e-6, "residual " + fmt("%.2e", worst));
  c.detail = "squarefree q <= 2000, 50 units each; residual " +
             fmt("%.1e", worst);
  return c;
}

// 2. Gauss sum modulus and twisted multiplicativity
Crit crit_gauss() {
  Crit c;
  double worst_mod = 0.0;
  for (u64 q : squarefree_up_to(500)) {
    dirichlet::CharacterGroup G(arith::factorize(q));
    for (u64 idx : G.primitive_indices()) {
      cplx t = dirichlet::gauss_sum_assembled(G.character(idx));
      worst_mod = std::max(worst_mod,
                           std::abs(std::norm(t) - (double)q) / (double)q);
    }
  }
  c.require(worst_mod <= 1e-8, "|tau|^2 residual " + fmt("%.2e", worst_mod));

  std::mt19937_64 rng(1002);
  auto qs = squarefree_up_to(100);
  std::uniform_int_distribution<size_t> pick(0, qs.size() - 1);
  double worst_tw = 0.0;
  int done = 0;
  while (done < 200) {
    u64 r = qs[pick(rng)], s = qs[pick(rng)];
    if (r < 2 || s < 2 || std::gcd(r, s) != 1) continue;
    ++done;
    dirichlet::CharacterGroup Gr(arith::factorize(r));
    dirichlet::CharacterGroup Gs(arith::factorize(s));
    std::uniform_int_distribution<u64> ir(0, Gr.size() - 1), is(0, Gs.size() - 1);
    auto psi = Gr.character(ir(rng));
    auto nu = Gs.character(is(rng));
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
    worst_tw = std::max(worst_tw, std::abs(direct - split));
  }
  c.require(worst_tw <= 1e-8, "twisted mult residual " + fmt("%.2e", worst_tw));
  c.detail = "modulus " + fmt("%.1e", worst_mod) + ", twisted mult " +
             fmt("%.1e", worst_tw) + " on 200 pairs";
  return c;
}

// 3. two-factor splitting of the character-average transform
Crit crit_transform_mult() {
  Crit c;
  std::mt19937_64 rng(1003);
  auto qs = squarefree_up_to(200);
  std::uniform_int_distribution<size_t> pick(0, qs.size() - 1);
  double worst = 0.0;
  int done = 0;
  while (done < 500) {
    u64 r = qs[pick(rng)], s = qs[pick(rng)];
    if (r < 2 || s < 2 || std::gcd(r, s) != 1 || r * s > 10000) continue;
    u64 rs = r * s;
    u64 ell = random_unit(rng, rs);
    int k = 2 + done % 3;
    ++done;
    auto fac = expsums::t_k_factored(ell, arith::factorize(r),
                                     arith::factorize(s), k);
    auto bru = expsums::t_k_brute(ell, arith::factorize(rs), k);
    worst = std::max(worst, std::abs(fac.value - bru.value));
  }
  c.require(worst <= 1e-8, "split residual " + fmt("%.2e", worst));
  c.detail = "500 instances, rs <= 10^4, k in {2,3,4}; worst " +
             fmt("%.1e", worst);
  return c;
}

// 4. paired-sum factorization against literal enumeration, degenerate
//    branches included
Crit crit_kk_routes() {
  Crit c;
  double worst = 0.0;
  int done = 0;
  auto run = [&](const expsums::KKParams& P) {
    cplx fac = expsums::kk_factored(P, 4);
    cplx bru = expsums::kk_brute(P, 4);
    worst = std::max(worst, std::abs(fac - bru));
    ++done;
    return fac;
  };
  auto make = [](u64 r, u64 s1, u64 s2, u64 v1, u64 v2, i64 ell) {
    expsums::KKParams P;
    P.r = arith::factorize(r);
    P.s1 = arith::factorize(s1);
    P.s2 = arith::factorize(s2);
    P.v1 = v1;
    P.v2 = v2;
    P.ell = ell;
    return P;
  };

  // shared-divisor shift misses: gcd(s1, s2) = 6 does not divide ell = 1
  cplx z1 = run(make(5, 6, 6, 7, 7, 1));
  c.require(std::abs(z1) <= 1e-10, "d-nmid-ell branch not zero");
  // reduced shift shares a factor with the coprime parts: gcd(6, 3*5) = 3
  cplx z2 = run(make(7, 6, 10, 11, 11, 6));
  c.require(std::abs(z2) <= 1e-10, "gcd(ell, s1* s2*) branch not zero");
  // corners: shared s, zero shift, equal points, trivial moduli
  run(make(15, 7, 7, 2, 2, 0));
  run(make(15, 7, 7, 2, 8, 3));
  run(make(1, 6, 35, 11, 13, 1));
  run(make(13, 1, 1, 3, 5, 0));
  run(make(33, 14, 7, 5, 5, 7));

  std::mt19937_64 rng(1004);
  auto qs = squarefree_up_to(60);
  std::uniform_int_distribution<size_t> pick(0, qs.size() - 1);
  std::uniform_int_distribution<int> shift(-25, 25), coin(0, 4);
  while (done < 207) {
    u64 r = qs[pick(rng)], s1 = qs[pick(rng)];
    u64 s2 = coin(rng) == 0 ? s1 : qs[pick(rng)];
    if (r * s1 * s2 > 30000 || std::gcd(r, s1 * s2) != 1) continue;
    u64 prod = r * s1 * s2;
    u64 v1 = random_unit(rng, prod);
    u64 v2 = coin(rng) == 0 ? v1 : random_unit(rng, prod);
    run(make(r, s1, s2, v1, v2, shift(rng)));
  }
  c.require(worst <= 1e-7, "route residual " + fmt("%.2e", worst));
  c.detail = std::to_string(done) + " instances, r s1 s2 <= 3*10^4; worst " +
             fmt("%.1e", worst);
  return c;
}

// 5. square-root cancellation envelopes, zero violations allowed
Crit crit_bounds() {
  Crit c;
  std::mt19937_64 rng(1005);
  double slack = 1e-9;
  int checked = 0;
  double worst_excess = -1e300;

  for (u64 p : arith::primes_up_to(500)) {
    for (int k = 2; k <= 4; ++k) {
      std::vector<u64> vs;
      if (p <= 47) {
        for (u64 v = 1; v < p; ++v) vs.push_back(v);
      } else {
        for (int t = 0; t < 6; ++t) vs.push_back(random_unit(rng, p));
      }
      for (u64 v : vs) {
        double ex = std::abs(expsums::hyper_kloosterman(v, p, k)) - (double)k;
        worst_excess = std::max(worst_excess, ex);
        c.require(ex <= slack, "Deligne excess " + fmt("%.2e", ex) + " at p=" +
                                   std::to_string(p));
        ++checked;
      }
    }
  }

  // diagonal paired sums against sqrt(r) * s
  auto qs = squarefree_up_to(300);
  for (u64 r : qs) {
    for (u64 s : squarefree_up_to(173)) {
      if (s < 2 || std::gcd(r, s) != 1 || r * s * s > 30000) continue;
      for (int t = 0; t < 3; ++t) {
        expsums::KKParams P;
        P.r = arith::factorize(r);
        P.s1 = P.s2 = arith::factorize(s);
        P.v1 = P.v2 = random_unit(rng, r * s * s);
        P.ell = 0;
        double ex = std::abs(expsums::kk_factored(P, 4)) -
                    std::sqrt((double)r) * (double)s;
        c.require(ex <= slack, "diagonal excess " + fmt("%.2e", ex) + " at r=" +
                                   std::to_string(r) + ", s=" +
                                   std::to_string(s));
        ++checked;
      }
    }
  }

  // prime-level diagonal with every unit and a divisible shift
  for (u64 p : arith::primes_up_to(500)) {
    for (u64 v = 1; v < p; ++v) {
      for (i64 ell : {(i64)0, (i64)p, -(i64)p}) {
        expsums::KKParams P;
        P.r = arith::factorize(p);
        P.s1 = P.s2 = arith::factorize(1);
        P.v1 = P.v2 = v;
        P.ell = ell;
        double ex =
            std::abs(expsums::kk_factored(P, 4)) - std::sqrt((double)p);
        c.require(ex <= slack, "prime diagonal excess " + fmt("%.2e", ex) +
                                   " at p=" + std::to_string(p));
        ++checked;
      }
    }
  }
  c.detail = std::to_string(checked) + " bound evaluations, worst K excess " +
             fmt("%.1e", worst_excess);
  return c;
}

// 6. reality of the even-order transform and the diagonal paired sum
Crit crit_reality() {
  Crit c;
  double worst_t = 0.0, worst_kk = 0.0;
  for (u64 q : squarefree_up_to(500)) {
    auto F = arith::factorize(q);
    for (u64 ell = 0; ell < q; ++ell)
      worst_t = std::max(
          worst_t, std::abs(expsums::t_k_prime_factored(ell, F, 4).value.imag()));
  }
  c.require(worst_t <= 1e-9, "Im T_4 = " + fmt("%.2e", worst_t));

  std::mt19937_64 rng(1006);
  auto qs = squarefree_up_to(60);
  std::uniform_int_distribution<size_t> pick(0, qs.size() - 1);
  int done = 0;
  while (done < 150) {
    u64 r = qs[pick(rng)], s = qs[pick(rng)];
    if (std::gcd(r, s) != 1 || r * s * s > 30000) continue;
    ++done;
    expsums::KKParams P;
    P.r = arith::factorize(r);
    P.s1 = P.s2 = arith::factorize(s);
    P.v1 = P.v2 = random_unit(rng, r * s * s);
    P.ell = 0;  // the zero-shift diagonal is the real-valued one
    worst_kk =
        std::max(worst_kk, std::abs(expsums::kk_factored(P, 4).imag()));
  }
  c.require(worst_kk <= 1e-9, "Im diagonal KK = " + fmt("%.2e", worst_kk));
  c.detail = "Im T_4 " + fmt("%.1e", worst_t) + ", Im KK diag " +
             fmt("%.1e", worst_kk);
  return c;
}

// 7. root-number transform: character side against the closed form
Crit crit_dual_transform() {
  Crit c;
  const auto& pi = autcoeffs::sym3_delta();
  c.require(
      std::abs(expsums::e_pi_transform(1, arith::factorize(1), pi) -
               pi.c_pi()) == 0.0,
      "trivial modulus");
  double worst = 0.0;
  for (u64 q : squarefree_up_to(200)) {
    if (q < 2) continue;
    auto F = arith::factorize(q);
    dirichlet::CharacterGroup G(F);
    std::vector<cplx> eps;
    std::vector<dirichlet::Character> bars;
    for (u64 idx : G.primitive_indices()) {
      eps.push_back(expsums::root_number_of(pi, G, G.character(idx)));
      bars.push_back(G.character(G.conjugate_index(idx)));
    }
    double rq = std::sqrt((double)q);
    for (u64 m = 1; m < q; ++m) {
      if (std::gcd(m, q) != 1) continue;
      cplx brute{0.0, 0.0};
      for (size_t i = 0; i < eps.size(); ++i)
        brute += eps[i] * G.eval(bars[i], m);
      u64 arg = arith::mulmod(pi.conductor() % q, arith::inv_mod(m, q), q);
      cplx formula = rq * pi.c_pi() * pi.w(q) *
                     expsums::t_k_prime_factored(arg, F, 4).value;
      worst = std::max(worst, std::abs(brute - formula) / (double)q);
    }
  }
  c.require(worst <= 1e-6, "route gap " + fmt("%.2e", worst) + " per q");
  c.detail = "all units, squarefree q <= 200; worst gap " +
             fmt("%.1e", worst) + " per unit of q";
  return c;
}

// 8. power sums against elementary data through the Newton ladder
Crit crit_newton() {
  Crit c;
  double worst = 0.0;
  for (const autcoeffs::CoeffProvider* pi :
       {&autcoeffs::sym3_delta(), &autcoeffs::rankin_delta_pair()}) {
    for (u64 p : arith::primes_up_to(100)) {
      cplx s[7];
      for (int l = 1; l <= 6; ++l) s[l] = autcoeffs::power_sum(*pi, p, l);
      cplx e1 = s[1];
      cplx e2 = (e1 * s[1] - s[2]) / 2.0;
      cplx e3 = (e2 * s[1] - e1 * s[2] + s[3]) / 3.0;
      cplx e4 = (e3 * s[1] - e2 * s[2] + e1 * s[3] - s[4]) / 4.0;
      auto e = pi->elementary(p);
      worst = std::max({worst, std::abs(e1 - e[0]), std::abs(e2 - e[1]),
                        std::abs(e3 - e[2]), std::abs(e4 - e[3])});
      // the same recurrence, run forward, must return s5 and s6
      cplx s5 = e1 * s[4] - e2 * s[3] + e3 * s[2] - e4 * s[1];
      cplx s6 = e1 * s[5] - e2 * s[4] + e3 * s[3] - e4 * s[2];
      worst = std::max({worst, std::abs(s5 - s[5]), std::abs(s6 - s[6])});
    }
  }
  c.require(worst <= 1e-9, "roundtrip error " + fmt("%.2e", worst));
  c.detail = "p <= 100, orders 1..6, both providers; worst " +
             fmt("%.1e", worst);
  return c;
}

// 9. divisor-split reduction identity across the full range
Crit crit_reduction() {
  Crit c;
  const auto& pi = autcoeffs::sym3_delta();
  double worst = 0.0;
  for (u64 n = 1; n <= 100000; ++n) {
    double r = moduli::reduction_identity_check(pi, n, 11, 97);
    auto F = arith::factorize(n);
    bool sq = true;
    int w = moduli::window_omega(F, 11, 97, sq);
    double scale = 1.0 + ((w >= 1 && sq) ? std::abs(pi.lambda_at(n)) : 0.0);
    worst = std::max(worst, r / scale);
  }
  c.require(worst <= 1e-9, "residual " + fmt("%.2e", worst));
  c.detail = "n <= 10^5, window [11, 97]; worst " + fmt("%.1e", worst);
  return c;
}

// 10. exact binomial partial sums under the entropy exponential
Crit crit_entropy() {
  Crit c;
  for (int n = 0; n <= 200; ++n) {
    for (int k = 0; 2 * k <= n; ++k) {
      auto eb = moduli::binomial_entropy_bound(n, k);
      double exact = eb.exact.convert_to<double>();
      c.require(exact <= eb.bound * (1.0 + 1e-9),
                "bound broken at n=" + std::to_string(n) +
                    ", k=" + std::to_string(k));
    }
  }
  auto probe = moduli::binomial_entropy_bound(30, 3);
  c.require(probe.exact == 4526, "partial sum at (30, 3) is not 4526");
  c.detail = "full grid n <= 200; (30, 3) = 4526";
  return c;
}

// 11. the mobius-phi convolution: brute equality, prime values,
//     multiplicativity
Crit crit_convolution() {
  Crit c;
  const int N = 10000;
  std::vector<int> mu(N + 1, 1), phi(N + 1);
  std::vector<bool> comp(N + 1, false);
  for (int i = 0; i <= N; ++i) phi[i] = i;
  for (int p = 2; p <= N; ++p) {
    if (comp[p]) continue;
    for (int j = p; j <= N; j += p) {
      if (j > p) comp[j] = true;
      mu[j] = (j / p) % p == 0 ? 0 : -mu[j];
      phi[j] -= phi[j] / p;
    }
  }
  std::vector<i64> brute(N + 1, 0);
  for (int d = 1; d <= N; ++d)
    for (int n = d; n <= N; n += d)
      if (mu[n / d] != 0) brute[n] += (i64)mu[n / d] * phi[d];

  for (int n = 1; n <= N; ++n)
    c.require(moduli::mobius_phi_convolution(arith::factorize((u64)n)) ==
                  brute[n],
              "brute mismatch at n=" + std::to_string(n));
  for (int p = 2; p <= N; ++p)
    if (!comp[p])
      c.require(brute[p] == p - 2, "prime value off at p=" + std::to_string(p));
  for (int m = 2; m <= 100; ++m)
    for (int n = m + 1; (i64)m * n <= N; ++n)
      if (std::gcd(m, n) == 1)
        c.require(brute[m * n] == brute[m] * brute[n],
                  "multiplicativity broken at " + std::to_string(m) + "*" +
                      std::to_string(n));
  c.detail = "brute equality n <= 10^4, primes, coprime products";
  return c;
}

// 12. central values under a doubled forward split, plus conjugation
Crit crit_afe_stability() {
  Crit c;
  const auto& pi = autcoeffs::sym3_delta();
  auto table = autcoeffs::coeff_table(pi, 64 * 2 * 50 * 50 + 2);
  lfun::AFEConfig base, doubled;
  doubled.split = 2.0;
  double worst_split = 0.0, worst_conj = 0.0;
  u64 rows = 0;
  for (u64 q : squarefree_up_to(50)) {
    dirichlet::CharacterGroup G(arith::factorize(q));
    auto r1 = lfun::l_central_all(pi, G, base, &table);
    auto r2 = lfun::l_central_all(pi, G, doubled, &table);
    rows += r1.size();
    for (size_t i = 0; i < r1.size(); ++i) {
      c.require(r1[i].chi_index == r2[i].chi_index, "row order changed");
      double rel = std::abs(r1[i].value - r2[i].value) /
                   (1.0 + std::abs(r1[i].value));
      worst_split = std::max(worst_split, rel);
    }
    for (auto& row : r1) {
      u64 bar = G.conjugate_index(row.chi_index);
      for (auto& other : r1)
        if (other.chi_index == bar)
          worst_conj = std::max(
              worst_conj, std::abs(other.value - std::conj(row.value)));
    }
  }
  c.require(worst_split <= 1e-4, "split drift " + fmt("%.2e", worst_split));
  c.require(worst_conj <= 1e-6, "conjugation gap " + fmt("%.2e", worst_conj));
  c.detail = std::to_string(rows) + " rows, q <= 50; split drift " +
             fmt("%.1e", worst_split) + ", conjugation " +
             fmt("%.1e", worst_conj);
  return c;
}

// 13. the working census: both parities produce a clear nonvanishing twist
Crit crit_census() {
  Crit c;
  moduli::ModuliProfile P;
  P.Q = 253;
  P.p1 = 11;
  P.p2 = 23;
  P.z = 50;
  P.max_omega = 0;
  P.f = 6;
  auto rep = census::run_census(autcoeffs::sym3_delta(), P);
  c.require(rep.members.size() >= 20,
            "only " + std::to_string(rep.members.size()) + " moduli");
  for (u64 q : rep.members) {
    c.require(q <= 10000, "modulus too large: " + std::to_string(q));
    c.require(std::gcd(q, (u64)6) == 1,
              "modulus not coprime to 6: " + std::to_string(q));
  }
  auto s = census::nonvanishing_summary(rep);
  c.require(s.skipped == 0, "rows were skipped");
  c.require(s.nonzero_even >= 1, "no even-parity twist above the floor");
  c.require(s.nonzero_odd >= 1, "no odd-parity twist above the floor");
  c.require(s.min_abs_nonzero > 1e-3,
            "floor breached: " + fmt("%.2e", s.min_abs_nonzero));
  c.detail = std::to_string(rep.members.size()) + " moduli, " +
             std::to_string(rep.rows.size()) + " rows; nonzero " +
             std::to_string(s.nonzero) + " (even " +
             std::to_string(s.nonzero_even) + ", odd " +
             std::to_string(s.nonzero_odd) + "), min |L| " +
             fmt("%.3f", s.min_abs_nonzero);
  return c;
}

// 14. band-limited reconstruction of the family sum
Crit crit_pipeline() {
  Crit c;
  moduli::ModuliProfile P;
  P.Q = 10;
  P.p1 = 2;
  P.p2 = 5;
  P.z = 11;
  P.max_omega = 0;
  P.f = 14;
  auto rep = census::pipeline_shape_check(autcoeffs::sym3_delta(), P);
  c.require(rep.pass, "shape check reported failure");
  c.require(rep.plus.rel_err <= 1e-6,
            "even-side error " + fmt("%.2e", rep.plus.rel_err));
  c.require(rep.minus.rel_err <= 1e-6,
            "odd-side error " + fmt("%.2e", rep.minus.rel_err));
  c.require(rep.minus.main_small_bands == cplx{0.0, 0.0},
            "odd-side main term is nonzero");
  c.require(std::abs(rep.plus.main_small_bands) > 0.0,
            "even-side main term vanished");
  c.detail = "singleton set; rebuild error " + fmt("%.1e", rep.plus.rel_err) +
             " / " + fmt("%.1e", rep.minus.rel_err) +
             ", odd main term exactly zero";
  return c;
}

// 15. exponent-parameter feasibility at the pinned corners
Crit crit_feasibility() {
  Crit c;
  auto bad = moduli::parameter_feasibility(0.1, 0.1, 0.1, 1.0, 11.0);
  c.require(!bad.feasible, "point (0.1, 0.1, 0.1, 1, 11) accepted");
  auto pt = moduli::schema_feasibility_search(1.0, 11.0);
  c.require(pt.feasible, "schema search found no feasible point");
  c.require(pt.slack_log_per_delta > 0 && pt.slack_band_per_delta > 0,
            "schema slack not positive");
  c.detail = "corner rejected; schema feasible at log(1/delta) = " +
             fmt("%.3e", pt.big_l) + " with slack " +
             fmt("%.2e", std::min(pt.slack_log_per_delta,
                                  pt.slack_band_per_delta));
  return c;
}

struct Gate {
  int num;
  const char* label;
  Crit (*fn)();
  double budget_s;  // 0 = no runtime pin
};

}  // namespace

int main() {
  const Gate gates[] = {
      {1, "primitive-character orthogonality", crit_orthogonality, 60.0},
      {2, "Gauss sum modulus and twisted multiplicativity", crit_gauss, 0.0},
      {3, "transform two-factor splitting", crit_transform_mult, 300.0},
      {4, "paired-sum factored vs brute routes", crit_kk_routes, 0.0},
      {5, "square-root cancellation envelopes", crit_bounds, 0.0},
      {6, "even-order reality", crit_reality, 0.0},
      {7, "root-number transform dual evaluation", crit_dual_transform, 0.0},
      {8, "Newton power-sum roundtrip", crit_newton, 0.0},
      {9, "divisor-split reduction identity", crit_reduction, 0.0},
      {10, "binomial entropy bound", crit_entropy, 0.0},
      {11, "mobius-phi convolution", crit_convolution, 0.0},
      {12, "central-value split stability and conjugation", crit_afe_stability,
       600.0},
      {13, "desk census nonvanishing", crit_census, 0.0},
      {14, "banded pipeline reconstruction", crit_pipeline, 0.0},
      {15, "exponent-parameter feasibility", crit_feasibility, 0.0},
  };

  int failures = 0;
  for (const auto& g : gates) {
    auto t0 = std::chrono::steady_clock::now();
    Crit c;
    try {
      c = g.fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (g.budget_s > 0 && secs > g.budget_s) {
      c.ok = false;
      c.detail += " [over budget: " + fmt("%.1f", secs) + "s > " +
                  fmt("%.0f", g.budget_s) + "s]";
    }
    std::printf("[%s] criterion %2d: %s (%s; %.1fs)\n",
                c.ok ? "PASS" : "FAIL", g.num, g.label, c.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  std::printf("acceptance: %d/15 criteria passed\n", 15 - failures);
  return failures;
}
