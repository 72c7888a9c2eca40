#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <random>

#include "charsum/lfun.hpp"

using namespace charsum;
using lfun::cplx;
using arith::u64;

namespace {

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

// Degree-four input with conductor 3 and a flat spectrum; only the header
// matters for the gcd rejection tests.
const autcoeffs::CoeffProvider& conductor_three() {
  static auto p = [] {
    write_file("lfun_cond3.lf",
               "#LFUNC v1\n"
               "name=flat-three\n"
               "degree=4\n"
               "conductor=3\n"
               "mu=1,2,3,4\n"
               "c_pi=1\n"
               "mode=satake\n");
    return autcoeffs::file_provider("lfun_cond3.lf");
  }();
  return *p;
}

// Quadratic character index: the unique self-conjugate primitive index.
u64 quadratic_index(const dirichlet::CharacterGroup& G) {
  for (u64 idx : G.primitive_indices())
    if (G.conjugate_index(idx) == idx) return idx;
  throw std::logic_error("no quadratic character");
}

}  // namespace

TEST_CASE("complex log-gamma matches classical values") {
  // Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(10) = 362880.
  REQUIRE(std::abs(lfun::lgamma_c({0.5, 0.0}).real() -
                   0.57236494292470008707) < 1e-13);
  REQUIRE(std::abs(lfun::lgamma_c({0.5, 0.0}).imag()) < 1e-13);
  REQUIRE(std::abs(lfun::lgamma_c({1.0, 0.0})) < 1e-13);
  REQUIRE(std::abs(lfun::lgamma_c({10.0, 0.0}).real() -
                   std::log(362880.0)) < 1e-12);

  // Gamma(1 + i), pinned from the reflection/recurrence value.
  cplx g1i = std::exp(lfun::lgamma_c({1.0, 1.0}));
  REQUIRE(std::abs(g1i - cplx{0.49801566811835604, -0.15494982830181069}) <
          1e-13);

  // Recurrence Gamma(z + 1) = z Gamma(z) across the shifted region.
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> re(0.05, 6.0), im(-12.0, 12.0);
  for (int i = 0; i < 200; ++i) {
    cplx z{re(rng), im(rng)};
    cplx ratio = std::exp(lfun::lgamma_c(z + 1.0) - lfun::lgamma_c(z));
    REQUIRE(std::abs(ratio - z) <= 1e-10 * (1.0 + std::abs(z)));
  }

  // Legendre duplication: Gamma(2z) = Gamma(z) Gamma(z + 1/2)
  //                       2^{2z-1} / sqrt(pi).
  for (int i = 0; i < 200; ++i) {
    cplx z{re(rng), im(rng)};
    cplx lhs = lfun::lgamma_c(2.0 * z);
    cplx rhs = lfun::lgamma_c(z) + lfun::lgamma_c(z + 0.5) +
               (2.0 * z - 1.0) * std::log(2.0) -
               0.5 * std::log(3.14159265358979323846);
    REQUIRE(std::abs(std::exp(lhs - rhs) - 1.0) < 1e-10);
  }

  // Gamma_R(1) = pi^{-1/2} Gamma(1/2) = 1 and Gamma_R(2) = 1/pi.
  REQUIRE(std::abs(lfun::lgamma_R({1.0, 0.0})) < 1e-13);
  REQUIRE(std::abs(lfun::lgamma_R({2.0, 0.0}).real() +
                   1.1447298858494001741) < 1e-13);

  REQUIRE_THROWS_AS(lfun::lgamma_c({-1.0, 2.0}), std::domain_error);
}

TEST_CASE("afe weight: endpoints, decay, quadrature stability") {
  const auto& pi = autcoeffs::sym3_delta();
  const auto& W = lfun::forward_weight(pi);

  // Flat near zero, dead past the grid.
  REQUIRE(std::abs(W(1e-6) - 1.0) < 1e-6);
  REQUIRE(W(1e-10) == 1.0);
  REQUIRE(W(1000.0) == 0.0);
  REQUIRE(W(64.0) == 0.0);
  REQUIRE(std::abs(W(1e3)) < 1e-8);

  // Central value and monotone decay along a dyadic chain.
  double w1 = W(1.0);
  REQUIRE(w1 > 0.0);
  REQUIRE(w1 < 1.2);
  REQUIRE(W(0.01) > 0.98);
  REQUIRE(W(0.25) > W(1.0));
  REQUIRE(W(1.0) > W(4.0));
  REQUIRE(W(4.0) > W(16.0));
  REQUIRE(W(16.0) > W(40.0));
  REQUIRE(W(16.0) < 1e-3);
  REQUIRE(W(16.0) > 1e-8);
  REQUIRE(W(40.0) < 1e-6);
  REQUIRE(W.cap_value() < 1e-10);

  // Grid agrees with the direct quadrature, and the quadrature with its own
  // refinement.
  for (double x : {0.03, 0.4, 1.0, 2.7, 8.0, 22.0}) {
    double d = W.direct(x);
    REQUIRE(std::abs(W(x) - d) <= 1e-8 * (1.0 + std::abs(d)));
    double d2 = W.direct(x, 0.03125);
    REQUIRE(std::abs(d - d2) <= 1e-10 * (1.0 + std::abs(d)));
  }

  // Same spectrum, same grid: the registry hands back one instance, and a
  // freshly built object reproduces it bit for bit through the disk cache.
  const auto& W_again = lfun::forward_weight(pi);
  REQUIRE(&W == &W_again);
  lfun::AfeWeight fresh(pi.mu(), "forward");
  for (double x : {1e-4, 0.2, 1.0, 5.0, 30.0}) REQUIRE(fresh(x) == W(x));

  // Real spectrum: the dual weight is the same function.
  const auto& Wd = lfun::dual_weight(pi);
  for (double x : {0.1, 1.0, 10.0}) REQUIRE(Wd(x) == W(x));

  // A second spectrum exercises the pole-filtered ladder.
  const auto& Wr = lfun::forward_weight(autcoeffs::rankin_delta_pair());
  REQUIRE(std::abs(Wr(1e-6) - 1.0) < 1e-6);
  REQUIRE(Wr(1.0) > 0.0);
  REQUIRE(Wr(1.0) < 1.2);
  REQUIRE(Wr(40.0) < 1e-4);

  REQUIRE_THROWS_AS(W(0.0), std::domain_error);
  REQUIRE_THROWS_AS(W(-2.0), std::domain_error);
}

TEST_CASE("afe weight rejects spectra it cannot integrate") {
  using A = std::array<cplx, 4>;
  // Not closed under conjugation.
  REQUIRE_THROWS_AS(
      lfun::AfeWeight(A{cplx{0.5, 1.0}, cplx{0.5, 0.0}, cplx{1.0, 0.0},
                        cplx{2.0, 0.0}},
                      "forward"),
      std::domain_error);
  // Too far left of the central line.
  REQUIRE_THROWS_AS(
      lfun::AfeWeight(A{cplx{-0.4, 0.0}, cplx{1.0, 0.0}, cplx{2.0, 0.0},
                        cplx{3.0, 0.0}},
                      "forward"),
      std::domain_error);
  // A conjugate pair is fine.  The leftmost pole at -1 keeps the contour
  // shallow, so the small-x plateau is only accurate to a few parts in 1e5.
  lfun::AfeWeight ok(
      A{cplx{0.5, 1.0}, cplx{0.5, -1.0}, cplx{1.0, 0.0}, cplx{2.0, 0.0}},
      "forward");
  REQUIRE(std::abs(ok(1e-6) - 1.0) < 1e-3);
  REQUIRE(ok(1.0) > 0.0);
}

TEST_CASE("smooth partition of unity telescopes to one") {
  auto V = lfun::partition_window();
  REQUIRE(V.lo == 0.5);
  REQUIRE(V.hi == 2.0);
  REQUIRE(V.f(1.0) == 1.0);
  REQUIRE(V.f(0.5) == 0.0);
  REQUIRE(V.f(2.0) == 0.0);
  REQUIRE(V.f(0.6) > 0.0);
  REQUIRE(V.f(1.9) > 0.0);

  REQUIRE(std::abs(V.norm_inf - 1.0) < 1e-9);
  REQUIRE(V.norm_d1 > 1.0);
  REQUIRE(V.norm_d1 < 30.0);
  REQUIRE(V.norm_d2 > 1.0);
  REQUIRE(V.norm_d2 < 1000.0);

  REQUIRE(lfun::partition_check(V) <= 1e-10);

  // Off-grid spot checks, including an irrational point.
  for (double x : {1.0, 3.0, 7.5, 1000.0 * std::sqrt(2.0), 999983.0}) {
    double s = 0.0;
    for (int j = -3; j < 25; ++j) s += V.f(x / std::exp2((double)j));
    REQUIRE(std::abs(s - 1.0) <= 1e-12);
  }

  REQUIRE_THROWS_AS(lfun::make_window([](double) { return 1.0; }, 2.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("root numbers at tiny moduli") {
  const auto& pi = autcoeffs::sym3_delta();
  const auto& rk = autcoeffs::rankin_delta_pair();

  // Untwisted: the sign is the form's own.
  auto G1 = dirichlet::char_group(1);
  REQUIRE(std::abs(lfun::root_number(pi, G1, 0) - cplx{-1.0, 0.0}) < 1e-12);
  REQUIRE(std::abs(lfun::root_number(rk, G1, 0) - cplx{1.0, 0.0}) < 1e-12);

  // Quadratic twists mod 5 and mod 3: fourth powers of tau/sqrt(q) are +1,
  // so the twisted sign equals the form's own sign.
  auto G5 = dirichlet::char_group(5);
  REQUIRE(std::abs(lfun::root_number(pi, G5, quadratic_index(G5)) -
                   cplx{-1.0, 0.0}) < 1e-10);
  REQUIRE(std::abs(lfun::root_number(rk, G5, quadratic_index(G5)) -
                   cplx{1.0, 0.0}) < 1e-10);
  auto G3 = dirichlet::char_group(3);
  REQUIRE(std::abs(lfun::root_number(pi, G3, quadratic_index(G3)) -
                   cplx{-1.0, 0.0}) < 1e-10);
  REQUIRE(std::abs(lfun::root_number(rk, G3, quadratic_index(G3)) -
                   cplx{1.0, 0.0}) < 1e-10);

  // Unimodularity across whole primitive families.
  for (u64 q : {5ull, 7ull, 15ull, 21ull, 33ull, 35ull, 105ull}) {
    auto G = dirichlet::char_group(q);
    for (u64 idx : G.primitive_indices()) {
      cplx eps = lfun::root_number(pi, G, idx);
      REQUIRE(std::abs(std::abs(eps) - 1.0) < 1e-6);
      // Conjugate twist, conjugate sign.
      cplx eps_bar = lfun::root_number(pi, G, G.conjugate_index(idx));
      REQUIRE(std::abs(eps_bar - std::conj(eps)) < 1e-9);
    }
  }

  // Imprimitive characters and shared conductors are rejected.
  auto G15 = dirichlet::char_group(15);
  bool found_imprimitive = false;
  for (u64 idx = 0; idx < G15.size(); ++idx) {
    if (!G15.is_primitive(G15.character(idx))) {
      REQUIRE_THROWS_AS(lfun::root_number(pi, G15, idx),
                        std::invalid_argument);
      found_imprimitive = true;
      break;
    }
  }
  REQUIRE(found_imprimitive);
  REQUIRE_THROWS_AS(lfun::root_number(conductor_three(), G15,
                                      G15.primitive_indices().front()),
                    std::invalid_argument);
}

TEST_CASE("central values: stability, symmetry, batching") {
  const auto& pi = autcoeffs::sym3_delta();
  auto table = autcoeffs::coeff_table(pi, 80000);

  // Untwisted value: the sign is -1, which forces a central zero, and the
  // cancellation between the two halves must survive rebalancing them.
  auto G1 = dirichlet::char_group(1);
  auto L1 = lfun::l_central(pi, G1, 0);
  REQUIRE(std::abs(L1.eps - cplx{-1.0, 0.0}) < 1e-12);
  REQUIRE(std::abs(L1.value) <= 1e-6);
  REQUIRE(std::abs(L1.value.imag()) <= 1e-6 * (1.0 + std::abs(L1.value)));
  REQUIRE(L1.tail_est <= 1e-8 * (1.0 + std::abs(L1.value)));
  REQUIRE(L1.terms_forward >= 30);
  REQUIRE(L1.forward.real() > 0.5);  // the halves are far from empty
  lfun::AFEConfig wide;
  wide.split = 2.0;
  auto L1w = lfun::l_central(pi, G1, 0, wide);
  REQUIRE(std::abs(L1.value - L1w.value) <=
          1e-6 * (1.0 + std::abs(L1.value)));

  // Mod 5: every primitive twist is stable under doubling the forward
  // scale, conjugate twists give conjugate values, and the even quadratic
  // twist is real.
  auto G5 = dirichlet::char_group(5);
  for (u64 idx : G5.primitive_indices()) {
    auto L = lfun::l_central(pi, G5, idx);
    auto Lw = lfun::l_central(pi, G5, idx, wide);
    REQUIRE(std::abs(L.value - Lw.value) <= 1e-4 * (1.0 + std::abs(L.value)));
    REQUIRE(std::abs(std::abs(L.eps) - 1.0) < 1e-6);
    auto Lbar = lfun::l_central(pi, G5, G5.conjugate_index(idx));
    REQUIRE(std::abs(Lbar.value - std::conj(L.value)) <=
            1e-6 * (1.0 + std::abs(L.value)));
    REQUIRE(L.parity == dirichlet::parity(G5.character(idx)));
  }
  u64 quad = quadratic_index(G5);
  auto Lq = lfun::l_central(pi, G5, quad);
  REQUIRE(Lq.parity == 1);
  REQUIRE(std::abs(Lq.value.imag()) <= 1e-6 * (1.0 + std::abs(Lq.value)));

  // Batched route reproduces the per-character route.
  auto G35 = dirichlet::char_group(35);
  auto rows = lfun::l_central_all(pi, G35, {}, &table);
  REQUIRE(rows.size() == G35.primitive_indices().size());
  REQUIRE(rows.size() == 15);
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    REQUIRE(rows[i].chi_index < rows[i + 1].chi_index);
  for (const auto& row : rows) {
    auto single = lfun::l_central(pi, G35, row.chi_index, {}, &table);
    REQUIRE(std::abs(row.value - single.value) <=
            1e-9 * (1.0 + std::abs(single.value)));
    REQUIRE(std::abs(row.eps - single.eps) < 1e-12);
    REQUIRE(row.parity == single.parity);
  }

  // Rejections: imprimitive character, shared conductor, bad split.
  auto G15 = dirichlet::char_group(15);
  for (u64 idx = 0; idx < G15.size(); ++idx)
    if (!G15.is_primitive(G15.character(idx))) {
      REQUIRE_THROWS_AS(lfun::l_central(pi, G15, idx), std::invalid_argument);
      break;
    }
  REQUIRE_THROWS_AS(lfun::l_central(conductor_three(), G15,
                                    G15.primitive_indices().front()),
                    std::invalid_argument);
  lfun::AFEConfig bad;
  bad.split = 0.0;
  REQUIRE_THROWS_AS(lfun::l_central(pi, G5, quad, bad),
                    std::invalid_argument);
}

TEST_CASE("band pieces: closed form against the literal character average") {
  const auto& pi = autcoeffs::sym3_delta();
  const auto& W1 = lfun::forward_weight(pi);
  const auto& W2 = lfun::dual_weight(pi);
  auto V = lfun::partition_window();
  const double scale = 225.0;

  // Forward side, both signs, single and multiple moduli.
  for (int sign : {+1, -1}) {
    for (double band : {1.0, 2.0, 8.0}) {
      auto p = lfun::forward_piece(pi, {15}, sign, band, V, W1, scale, true);
      REQUIRE(p.cross_checked);
      REQUIRE(std::abs(p.value - p.direct) <=
              1e-6 * (1.0 + std::abs(p.value)));
    }
    auto p = lfun::forward_piece(pi, {15, 35, 7}, sign, 16.0, V, W1, scale,
                                 true);
    REQUIRE(std::abs(p.value - p.direct) <= 1e-6 * (1.0 + std::abs(p.value)));
  }

  // The band around n = 1: with the plus sign the diagonal row n = 1 carries
  // the full phi(15) = 8, and the whole piece is the primitive count
  // phistar(15) = 3 times the n = 1 row; with the minus sign the diagonal
  // needs n = 14 (mod 15), which the band cannot reach, so the main term
  // vanishes identically.
  cplx row1 = V.f(1.0) * W1(1.0 / scale);
  auto plus = lfun::forward_piece(pi, {15}, +1, 1.0, V, W1, scale, true);
  REQUIRE(std::abs(plus.main_term - 8.0 * row1) < 1e-12);
  REQUIRE(std::abs(plus.value - 3.0 * row1) < 1e-12);
  auto minus = lfun::forward_piece(pi, {15}, -1, 1.0, V, W1, scale, true);
  REQUIRE(minus.main_term == cplx{0.0, 0.0});
  REQUIRE(std::abs(minus.value - minus.direct) <= 1e-12);

  // A band whose integers all miss the divisor congruences: every surviving
  // row is weighted by mu(15) = +1 alone.  (n = 3 shares a factor with the
  // modulus, so only n = 2 survives.)
  auto off = lfun::forward_piece(pi, {15}, +1, 2.0, V, W1, scale, true);
  cplx plain{0.0, 0.0};
  for (u64 n = 1; n <= 4; ++n) {
    if (std::gcd(n, (u64)15) != 1) continue;
    plain += pi.lambda_at(n) * V.f((double)n / 2.0) * W1((double)n / scale) /
             std::sqrt((double)n);
  }
  REQUIRE(std::abs(off.value - plain) < 1e-12);
  REQUIRE(off.main_term == cplx{0.0, 0.0});

  // Dual side: the fourth-power transform against the literal average over
  // root numbers.
  for (int sign : {+1, -1}) {
    for (u64 q : {15ull, 35ull}) {
      auto d = lfun::dual_piece(pi, {q}, sign, 2.0, V, W2, scale, true);
      REQUIRE(std::abs(d.value - d.direct) <=
              1e-6 * (1.0 + std::abs(d.value)));
      REQUIRE(d.main_term == cplx{0.0, 0.0});
    }
    auto d = lfun::dual_piece(pi, {15, 7}, sign, 4.0, V, W2, scale, true);
    REQUIRE(std::abs(d.value - d.direct) <= 1e-6 * (1.0 + std::abs(d.value)));
  }

  // Guards.
  REQUIRE_THROWS_AS(lfun::forward_piece(pi, {15}, 0, 1.0, V, W1, scale),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(lfun::forward_piece(pi, {15}, 1, -1.0, V, W1, scale),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(lfun::dual_piece(pi, {15}, 2, 1.0, V, W2, scale),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      lfun::dual_piece(conductor_three(), {15}, 1, 1.0, V, W2, scale),
      std::invalid_argument);
}

TEST_CASE("banded decomposition reconstructs the signed family sums") {
  const auto& pi = autcoeffs::sym3_delta();
  const u64 q = 15;
  auto G = dirichlet::char_group(q);
  auto table = autcoeffs::coeff_table(pi, 33000);
  auto rows = lfun::l_central_all(pi, G, {}, &table);

  const auto& W1 = lfun::forward_weight(pi);
  const auto& W2 = lfun::dual_weight(pi);
  auto V = lfun::partition_window();
  double scale = (double)q * (double)q;  // balanced split, conductor 1

  for (int sign : {+1, -1}) {
    cplx family{0.0, 0.0};
    for (const auto& row : rows)
      family += (sign > 0 ? 1.0 : (double)row.parity) * row.value;

    cplx banded{0.0, 0.0};
    for (double band = 0.5; band * V.lo < lfun::AfeWeight::kXMax * scale;
         band *= 2.0) {
      banded += lfun::forward_piece(pi, {q}, sign, band, V, W1, scale, false,
                                    &table)
                    .value;
      banded +=
          lfun::dual_piece(pi, {q}, sign, band, V, W2, scale, false, &table)
              .value;
    }
    REQUIRE(std::abs(banded - family) <= 1e-4 * (1.0 + std::abs(family)));
  }
}
