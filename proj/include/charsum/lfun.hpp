#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/autcoeffs.hpp"
#include "charsum/cache.hpp"
#include "charsum/dirichlet.hpp"
#include "charsum/expsums.hpp"

// Central L-values of degree-four forms twisted by primitive Dirichlet
// characters.  The approximate functional equation is evaluated with a
// numerically computed smoothing weight (a shifted contour integral of the
// archimedean gamma factors), either one character at a time or batched
// over the whole primitive family of a modulus.  Band-limited forward and
// dual pieces of the same sums, with the character average swapped out for
// its closed form, support the pipeline reshuffling checks.

namespace charsum::lfun {

using arith::Factored;
using arith::i64;
using arith::u64;
using autcoeffs::CoeffProvider;
using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Complex log-gamma
//
// Lanczos approximation (g = 7, nine terms), good to ~1e-13 once
// Re z >= 1.5; smaller real parts are raised by the recurrence.  Only the
// right half plane is ever needed here, so anything else is rejected.

inline cplx lgamma_c(cplx z) {
  static constexpr double kCoef[9] = {
      0.99999999999980993,     676.5203681218851,
      -1259.1392167224028,     771.32342877765313,
      -176.61502916214059,     12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6,
      1.5056327351493116e-7};
  if (!(z.real() > 0.0)) throw std::domain_error("lgamma_c requires Re z > 0");
  cplx shift{0.0, 0.0};
  while (z.real() < 1.5) {
    shift -= std::log(z);
    z += 1.0;
  }
  z -= 1.0;
  cplx ser{kCoef[0], 0.0};
  for (int k = 1; k < 9; ++k) ser += kCoef[k] / (z + (double)k);
  cplx t = z + 7.5;
  return 0.91893853320467274178 + (z + 0.5) * std::log(t) - t +
         std::log(ser) + shift;
}

// log of Gamma_R(z) = pi^{-z/2} Gamma(z/2).
inline cplx lgamma_R(cplx z) {
  return -(z * 0.5) * 1.1447298858494001741 + lgamma_c(z * 0.5);
}

// ---------------------------------------------------------------------------
// AFE smoothing weight
//
//   W(x) = (1/2 pi i) int_(sigma) e^{s^2/64} / s
//            * prod_j Gamma_R(1/2 + s + mu_j) / Gamma_R(1/2 + mu_j)
//            * x^{-s} ds.
//
// The vertical line is picked per argument from a fixed ladder by minimising
// the t = 0 integrand; crossing to sigma < 0 for x < 1 collects the residue
// 1 at s = 0.  Values are tabulated on a log-spaced grid over [1e-9, 64]
// (clamped to 1 on the left and 0 on the right, where the integral has died
// far below working precision) and read back by cubic interpolation.
// Finished grids are cached on disk, keyed by the spectral parameters.

inline void require_conjugate_closed(const std::array<cplx, 4>& mu) {
  auto a = mu, b = mu;
  for (auto& z : b) z = std::conj(z);
  auto by_parts = [](const cplx& u, const cplx& v) {
    return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
  };
  std::sort(a.begin(), a.end(), by_parts);
  std::sort(b.begin(), b.end(), by_parts);
  for (int j = 0; j < 4; ++j)
    if (std::abs(a[j] - b[j]) > 1e-9)
      throw std::domain_error(
          "spectral parameters are not closed under conjugation");
}

class AfeWeight {
 public:
  static constexpr double kXMin = 1e-9;
  static constexpr double kXMax = 64.0;
  static constexpr int kGridSize = 8192;
  static constexpr double kStep = 0.0625;

  AfeWeight(const std::array<cplx, 4>& mu, const std::string& role)
      : mu_(mu), role_(role) {
    require_conjugate_closed(mu_);
    mu_min_ = mu_[0].real();
    for (const auto& m : mu_) mu_min_ = std::min(mu_min_, m.real());
    if (mu_min_ < -0.12)
      throw std::domain_error(
          "spectral parameter too far left for the weight contour");
    base_ = {0.0, 0.0};
    for (const auto& m : mu_) base_ += lgamma_R(cplx{0.5, 0.0} + m);
    build_ladders();
    lnx_lo_ = std::log(kXMin);
    dln_ = (std::log(kXMax) - lnx_lo_) / (kGridSize - 1);
    u64 key = grid_key();
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)key);
    std::string rel = std::string("weights/") + role_ + "_" + hex + ".bin";
    if (!(cache::load(rel, cache::kKindWeight, key, grid_) &&
          grid_.size() == (size_t)kGridSize)) {
      build_grid();
      cache::store(rel, cache::kKindWeight, key, grid_);
    }
    cap_value_ = std::abs(direct(kXMax));
    self_check();
  }

  // Grid route: 1 left of the grid, 0 right of it, cubic in log x between.
  double operator()(double x) const {
    if (!(x > 0.0)) throw std::domain_error("weight argument must be positive");
    if (x <= kXMin) return 1.0;
    if (x >= kXMax) return 0.0;
    double u = (std::log(x) - lnx_lo_) / dln_;
    int i = std::clamp((int)std::floor(u), 1, kGridSize - 3);
    double t = u - i;
    const double* g = grid_.data() + (i - 1);
    double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return g[0] * c0 + g[1] * c1 + g[2] * c2 + g[3] * c3;
  }

  // Quadrature route, bypassing the grid.  The optional step is clamped to
  // the contour's own bound, so it can only refine, never coarsen.
  double direct(double x) const { return direct(x, kStep); }
  double direct(double x, double step) const {
    if (!(x > 0.0)) throw std::domain_error("weight argument must be positive");
    double lnx = std::log(x);
    const Line& l = pick_line(lnx);
    double v = line_integral(l.sigma, std::min(step, l.step), lnx);
    return l.sigma < 0.0 ? 1.0 + v : v;
  }

  // |W| at the right edge of the grid; bounds what the clamp to 0 discards.
  double cap_value() const { return cap_value_; }
  const std::array<cplx, 4>& mu() const { return mu_; }
  const std::string& role() const { return role_; }

 private:
  struct Line {
    double sigma = 0.0;
    double score = 0.0;  // ln of the t = 0 integrand, x term excluded
    double step = 0.0;
  };

  Line make_line(double s) const {
    double wall = -(0.5 + mu_min_);  // leftmost gamma pole on the real axis
    double dpole = std::min(std::abs(s), std::abs(s - wall));
    Line l;
    l.sigma = s;
    l.step = std::min(kStep, dpole / 4.0);
    l.score = s * s / 64.0 - std::log(std::abs(s));
    for (const auto& m : mu_)
      l.score += (lgamma_R(cplx{0.5 + s, 0.0} + m) - lgamma_R(cplx{0.5, 0.0} + m))
                     .real();
    return l;
  }

  void build_ladders() {
    for (double s : {1.2, 4.0, 8.0, 16.0, 24.0, 32.0, 48.0, 64.0, 80.0, 100.0})
      pos_.push_back(make_line(s));
    double wall = -(0.5 + mu_min_);
    for (double s : {-1.0, -2.0, -3.0, -4.0, -5.0, -5.9})
      if (s > wall + 0.1) neg_.push_back(make_line(s));
    double deep = wall + 0.12;
    if (deep < -0.25 && (neg_.empty() || deep < neg_.back().sigma - 0.01))
      neg_.push_back(make_line(deep));
    if (neg_.empty()) neg_.push_back(make_line(std::max(wall * 0.5, -0.25)));
  }

  const Line& pick_line(double lnx) const {
    const auto& ladder = lnx < 0.0 ? neg_ : pos_;
    const Line* best = &ladder.front();
    double best_v = best->score - best->sigma * lnx;
    for (const auto& l : ladder) {
      double v = l.score - l.sigma * lnx;
      if (v < best_v) {
        best_v = v;
        best = &l;
      }
    }
    return *best;
  }

  // ln of the integrand at s.  Branch jumps are immaterial: the value is
  // only ever used through exp.
  cplx ln_integrand(cplx s) const {
    cplx g = s * s * (1.0 / 64.0) - std::log(s) - base_;
    for (const auto& m : mu_) g += lgamma_R(cplx{0.5, 0.0} + s + m);
    return g;
  }

  double line_integral(double sigma, double step, double lnx) const {
    double T = std::sqrt(sigma * sigma + 2880.0);
    int n = (int)std::ceil(T / step);
    double acc =
        0.5 * std::exp(ln_integrand(cplx{sigma, 0.0}) - sigma * lnx).real();
    for (int k = 1; k <= n; ++k) {
      cplx s{sigma, k * step};
      acc += std::exp(ln_integrand(s) - s * lnx).real();
    }
    return acc * step * (1.0 / 3.14159265358979323846);
  }

  void build_grid() {
    grid_.assign(kGridSize, 0.0);
    std::map<const Line*, std::vector<int>> groups;
    for (int i = 0; i < kGridSize; ++i)
      groups[&pick_line(lnx_lo_ + i * dln_)].push_back(i);
    for (const auto& [l, idx] : groups) {
      double T = std::sqrt(l->sigma * l->sigma + 2880.0);
      int n = (int)std::ceil(T / l->step);
      std::vector<cplx> lnc(n + 1);
      for (int k = 0; k <= n; ++k)
        lnc[k] = ln_integrand(cplx{l->sigma, k * l->step});
      for (int i : idx) {
        double lnx = lnx_lo_ + i * dln_;
        double acc = 0.5 * std::exp(lnc[0] - l->sigma * lnx).real();
        for (int k = 1; k <= n; ++k)
          acc += std::exp(lnc[k] - cplx{l->sigma, k * l->step} * lnx).real();
        double v = acc * l->step * (1.0 / 3.14159265358979323846);
        grid_[i] = l->sigma < 0.0 ? 1.0 + v : v;
      }
    }
  }

  u64 grid_key() const {
    u64 h = 1469598103934665603ull;
    auto mix = [&h](const void* p, size_t n) {
      const unsigned char* b = (const unsigned char*)p;
      for (size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    };
    for (const auto& m : mu_) {
      double re = m.real(), im = m.imag();
      mix(&re, sizeof re);
      mix(&im, sizeof im);
    }
    mix(role_.data(), role_.size());
    int gs = kGridSize;
    double xm = kXMax, st = kStep;
    mix(&gs, sizeof gs);
    mix(&xm, sizeof xm);
    mix(&st, sizeof st);
    return h;
  }

  void self_check() const {
    const double xs[] = {1e-3, 0.01, 0.1, 0.3, 0.7, 0.95, 1.0, 1.5,
                         2.5,  4.0,  7.0, 11.0, 17.0, 26.0, 38.0, 55.0};
    for (double x : xs) {
      double lnx = std::log(x);
      const Line& l = pick_line(lnx);
      double a = line_integral(l.sigma, l.step, lnx);
      double b = line_integral(l.sigma, l.step * 0.5, lnx);
      if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(a)))
        throw std::runtime_error("afe weight: quadrature failed to converge");
    }
    // How far the left end can sit from 1 depends on how deep a contour the
    // spectrum's leftmost pole allows; 1e-4 covers even the shallowest case.
    if (std::abs(grid_.front() - 1.0) > 1e-4)
      throw std::runtime_error("afe weight: left end of the grid is not 1");
    if (std::abs(grid_.front() - direct(kXMin)) > 1e-8)
      throw std::runtime_error("afe weight: left end disagrees with quadrature");
    if (std::abs(grid_.back()) > 1e-10)
      throw std::runtime_error("afe weight: right end of the grid is live");
    for (double x : {0.02, 0.6, 1.7, 9.0, 31.0}) {
      double d = direct(x);
      if (std::abs((*this)(x) - d) > 1e-8 * (1.0 + std::abs(d)))
        throw std::runtime_error("afe weight: interpolation drifted");
    }
  }

  std::array<cplx, 4> mu_;
  std::string role_;
  cplx base_{0.0, 0.0};
  double mu_min_ = 0.0;
  double lnx_lo_ = 0.0, dln_ = 0.0;
  double cap_value_ = 0.0;
  std::vector<Line> pos_, neg_;
  std::vector<double> grid_;
};

// Grids are expensive to build, so one instance is shared per spectrum and
// role for the life of the process.
inline const AfeWeight& afe_weight(const std::array<cplx, 4>& mu,
                                   const std::string& role) {
  using Key = std::pair<std::array<double, 8>, std::string>;
  static std::mutex lock;
  static auto* registry = new std::map<Key, std::unique_ptr<AfeWeight>>();
  std::array<double, 8> flat{};
  for (int j = 0; j < 4; ++j) {
    flat[2 * j] = mu[j].real();
    flat[2 * j + 1] = mu[j].imag();
  }
  std::lock_guard<std::mutex> guard(lock);
  auto& slot = (*registry)[Key{flat, role}];
  if (!slot) slot = std::make_unique<AfeWeight>(mu, role);
  return *slot;
}

inline std::array<cplx, 4> dual_spectrum(const std::array<cplx, 4>& mu) {
  auto out = mu;
  for (auto& z : out) z = std::conj(z);
  return out;
}

inline const AfeWeight& forward_weight(const CoeffProvider& pi) {
  return afe_weight(pi.mu(), "forward");
}
inline const AfeWeight& dual_weight(const CoeffProvider& pi) {
  return afe_weight(dual_spectrum(pi.mu()), "dual");
}

// ---------------------------------------------------------------------------
// Smooth windows and the dyadic partition of unity

struct SmoothWindow {
  std::function<double(double)> f;
  double lo = 0.0;  // support
  double hi = 0.0;
  double norm_inf = 0.0, norm_d1 = 0.0, norm_d2 = 0.0;
};

// Wraps a callback with sampled sup norms of the function and its first two
// derivatives (central differences on a dense grid).  The callback must be
// evaluable slightly outside [lo, hi].
inline SmoothWindow make_window(std::function<double(double)> f, double lo,
                                double hi) {
  if (!(0.0 < lo && lo < hi))
    throw std::invalid_argument("window support must satisfy 0 < lo < hi");
  SmoothWindow w{std::move(f), lo, hi, 0.0, 0.0, 0.0};
  const int n = 50000;
  const double span = hi - lo, h1 = span * 1e-6, h2 = span * 5e-5;
  for (int i = 0; i <= n; ++i) {
    double x = lo + span * i / n;
    double v = w.f(x);
    double d1 = (w.f(x + h1) - w.f(x - h1)) / (2.0 * h1);
    double d2 = (w.f(x + h2) + w.f(x - h2) - 2.0 * v) / (h2 * h2);
    w.norm_inf = std::max(w.norm_inf, std::abs(v));
    w.norm_d1 = std::max(w.norm_d1, std::abs(d1));
    w.norm_d2 = std::max(w.norm_d2, std::abs(d2));
  }
  return w;
}

// Dyadic partition piece V(x) = S(log2 x + 1) - S(log2 x) built from a
// smoothed step S.  Supported in (1/2, 2), and the shifts V(x / 2^j) sum to
// 1 exactly for every x > 0: consecutive shifts share their S evaluations,
// so the sum telescopes even in floating point.
inline SmoothWindow partition_window() {
  auto step = [](double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = std::exp(-1.0 / u);
    double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
  };
  auto f = [step](double x) {
    if (!(x > 0.0)) return 0.0;
    double l = std::log2(x);
    return step(l + 1.0) - step(l);
  };
  return make_window(f, 0.5, 2.0);
}

// Largest deviation of sum_j V(x / 2^j) from 1 on a dense grid in [1, 1e6].
inline double partition_check(const SmoothWindow& V) {
  if (!(V.lo > 0.0))
    throw std::invalid_argument("window must have positive support");
  double worst = 0.0;
  const int n = 20000;
  const double top = std::log(1e6);
  for (int i = 0; i <= n; ++i) {
    double x = std::exp(top * i / n);
    int jlo = (int)std::floor(std::log2(x / V.hi)) - 1;
    int jhi = (int)std::ceil(std::log2(x / V.lo)) + 1;
    double s = 0.0;
    for (int j = jlo; j <= jhi; ++j) s += V.f(x / std::exp2((double)j));
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Central values

struct AFEConfig {
  // Forward terms are weighted at scale split * q^2 sqrt(N), dual terms at
  // the complementary scale; split = 1 is the balanced equation.
  double split = 1.0;
  u64 term_cap = u64(1) << 26;
  double tail_tol = 1e-8;  // absolute tail bound required for an early stop
};

struct TwistedLValue {
  u64 q = 1;
  u64 chi_index = 0;
  int parity = 1;
  cplx value{0.0, 0.0};
  cplx eps{0.0, 0.0};
  cplx forward{0.0, 0.0};
  cplx dual{0.0, 0.0};
  double tail_est = 0.0;
  u64 terms_forward = 0;
  u64 terms_dual = 0;
};

inline cplx root_number(const CoeffProvider& pi,
                        const dirichlet::CharacterGroup& G, u64 chi_index) {
  auto chi = G.character(chi_index);
  if (!G.is_primitive(chi))
    throw std::invalid_argument("root number needs a primitive character");
  if (std::gcd(G.q(), pi.conductor()) != 1)
    throw std::invalid_argument(
        "twisting modulus shares a factor with the conductor");
  return expsums::root_number_of(pi, G, chi);
}

namespace detail {

struct SweepResult {
  double tail = 0.0;
  u64 terms = 0;
  bool converged = false;
};

// Feeds row(n, lambda(n) W(n / scale) / sqrt n) for n = 1, 2, ... until
// either the weight grid's right edge is passed, or the weight has died and
// three consecutive rows were negligible against the running absolute
// envelope with the crude tail bound under tolerance.
template <class Row>
SweepResult afe_sweep(const CoeffProvider& pi, const std::vector<cplx>* table,
                      bool conj_coeff, const AfeWeight& W, double scale,
                      const AFEConfig& cfg, Row&& row) {
  SweepResult r;
  double env = 0.0;
  int quiet = 0;
  for (u64 n = 1; n <= cfg.term_cap; ++n) {
    double y = (double)n / scale;
    if (y >= AfeWeight::kXMax) {
      r.tail = 4.0 * W.cap_value() * std::sqrt((double)n) *
               std::log((double)n + 2.0);
      r.terms = n - 1;
      r.converged = true;
      return r;
    }
    double w = W(y);
    cplx lam =
        table && n < table->size() ? (*table)[n] : pi.lambda_at(n);
    if (conj_coeff) lam = std::conj(lam);
    cplx cw = lam * (w / std::sqrt((double)n));
    row(n, cw);
    double mag = std::abs(cw);
    env += mag;
    quiet = mag < 1e-12 * (1.0 + env) ? quiet + 1 : 0;
    double tail =
        4.0 * std::abs(w) * std::sqrt((double)n) * std::log((double)n + 2.0);
    if (std::abs(w) < 1e-12 && quiet >= 3 && tail <= cfg.tail_tol) {
      r.tail = tail;
      r.terms = n;
      r.converged = true;
      return r;
    }
  }
  r.tail = 1.0;  // cap reached with the weight still live
  r.terms = cfg.term_cap;
  return r;
}

}  // namespace detail

// Central value of one primitive twist by both halves of the approximate
// functional equation.  An optional dense coefficient table (indexed by n,
// entry 0 unused) short-circuits provider lookups.
inline TwistedLValue l_central(const CoeffProvider& pi,
                               const dirichlet::CharacterGroup& G,
                               u64 chi_index, const AFEConfig& cfg = {},
                               const std::vector<cplx>* table = nullptr) {
  auto chi = G.character(chi_index);
  if (!G.is_primitive(chi))
    throw std::invalid_argument("central value needs a primitive character");
  u64 q = G.q();
  if (std::gcd(q, pi.conductor()) != 1)
    throw std::invalid_argument(
        "twisting modulus shares a factor with the conductor");
  if (!(cfg.split > 0.0)) throw std::invalid_argument("split must be positive");
  const AfeWeight& W1 = forward_weight(pi);
  const AfeWeight& W2 = dual_weight(pi);
  double root_cond = (double)q * (double)q * std::sqrt((double)pi.conductor());
  auto bar = G.character(G.conjugate_index(chi_index));

  TwistedLValue out;
  out.q = q;
  out.chi_index = chi_index;
  out.parity = G.parity(chi);
  out.eps = expsums::root_number_of(pi, G, chi);
  auto fwd = detail::afe_sweep(
      pi, table, false, W1, cfg.split * root_cond, cfg,
      [&](u64 n, cplx cw) { out.forward += cw * G.eval(chi, n); });
  auto dul = detail::afe_sweep(
      pi, table, true, W2, root_cond / cfg.split, cfg,
      [&](u64 n, cplx cw) { out.dual += cw * G.eval(bar, n); });
  out.value = out.forward + out.eps * out.dual;
  out.tail_est = fwd.tail + dul.tail;
  out.terms_forward = fwd.terms;
  out.terms_dual = dul.terms;
  return out;
}

// Residue-class sums shared by every character of one modulus: the whole
// primitive family then costs one coefficient sweep plus phi(q) work per
// character instead of phi(q) sweeps.
struct ClassSums {
  u64 q = 1;
  std::vector<cplx> forward;  // indexed by residue mod q
  std::vector<cplx> dual;
  double tail_forward = 0.0, tail_dual = 0.0;
  u64 terms_forward = 0, terms_dual = 0;
};

inline ClassSums class_sums(const CoeffProvider& pi, const Factored& qf,
                            const AFEConfig& cfg = {},
                            const std::vector<cplx>* table = nullptr) {
  u64 q = qf.value;
  if (std::gcd(q, pi.conductor()) != 1)
    throw std::invalid_argument(
        "twisting modulus shares a factor with the conductor");
  if (!(cfg.split > 0.0)) throw std::invalid_argument("split must be positive");
  const AfeWeight& W1 = forward_weight(pi);
  const AfeWeight& W2 = dual_weight(pi);
  double root_cond = (double)q * (double)q * std::sqrt((double)pi.conductor());

  ClassSums cs;
  cs.q = q;
  cs.forward.assign(q, cplx{0.0, 0.0});
  cs.dual.assign(q, cplx{0.0, 0.0});
  auto fwd = detail::afe_sweep(pi, table, false, W1, cfg.split * root_cond,
                               cfg, [&](u64 n, cplx cw) {
                                 u64 a = n % q;
                                 if (q == 1 || std::gcd(a, q) == 1)
                                   cs.forward[a] += cw;
                               });
  auto dul = detail::afe_sweep(pi, table, true, W2, root_cond / cfg.split,
                               cfg, [&](u64 n, cplx cw) {
                                 u64 a = n % q;
                                 if (q == 1 || std::gcd(a, q) == 1)
                                   cs.dual[a] += cw;
                               });
  cs.tail_forward = fwd.tail;
  cs.tail_dual = dul.tail;
  cs.terms_forward = fwd.terms;
  cs.terms_dual = dul.terms;
  return cs;
}

// Central values of every primitive twist mod q, in ascending character
// index, via one shared class-sum sweep.
inline std::vector<TwistedLValue> l_central_all(
    const CoeffProvider& pi, const dirichlet::CharacterGroup& G,
    const AFEConfig& cfg = {}, const std::vector<cplx>* table = nullptr) {
  ClassSums cs = class_sums(pi, G.modulus(), cfg, table);
  std::vector<TwistedLValue> rows;
  for (u64 idx : G.primitive_indices()) {
    auto chi = G.character(idx);
    auto bar = G.character(G.conjugate_index(idx));
    TwistedLValue row;
    row.q = cs.q;
    row.chi_index = idx;
    row.parity = G.parity(chi);
    row.eps = expsums::root_number_of(pi, G, chi);
    for (u64 a = 0; a < cs.q; ++a) {
      if (cs.forward[a] != cplx{0.0, 0.0})
        row.forward += G.eval(chi, a) * cs.forward[a];
      if (cs.dual[a] != cplx{0.0, 0.0})
        row.dual += G.eval(bar, a) * cs.dual[a];
    }
    row.value = row.forward + row.eps * row.dual;
    row.tail_est = cs.tail_forward + cs.tail_dual;
    row.terms_forward = cs.terms_forward;
    row.terms_dual = cs.terms_dual;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Band-limited forward and dual pieces
//
// One dyadic slice of the family-summed forward (or dual) half of the
// functional equation, with the character average replaced by its closed
// form: the signed primitive-character count on the forward side, the
// fourth-power transform on the dual side.  The sign weights every
// character by chi(sign 1), so the diagonal rows n = sign (mod q) carry the
// full phi(q) mass; those rows are reported separately as main_term.

struct BandPiece {
  cplx value{0.0, 0.0};      // closed-form route
  cplx direct{0.0, 0.0};     // literal character average, when cross-checked
  cplx main_term{0.0, 0.0};  // rows n = sign (mod q)
  bool cross_checked = false;
};

inline BandPiece forward_piece(const CoeffProvider& pi,
                               const std::vector<u64>& moduli, int sign,
                               double band, const SmoothWindow& V,
                               const AfeWeight& W1, double scale,
                               bool cross_check = false,
                               const std::vector<cplx>* table = nullptr) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  if (!(band > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("band and scale must be positive");
  BandPiece out;
  out.cross_checked = cross_check;
  std::vector<Factored> fq;
  std::vector<double> phi;
  std::vector<std::unique_ptr<dirichlet::CharacterGroup>> groups;
  for (u64 q : moduli) {
    fq.push_back(arith::factorize(q));
    phi.push_back((double)fq.back().phi());
    if (cross_check)
      groups.push_back(std::make_unique<dirichlet::CharacterGroup>(fq.back()));
  }
  u64 lo = std::max<u64>(1, (u64)std::ceil(band * V.lo));
  u64 hi = (u64)std::floor(band * V.hi);
  for (u64 n = lo; n <= hi; ++n) {
    double v = V.f((double)n / band);
    if (v == 0.0) continue;
    double w = W1((double)n / scale);
    cplx lam = table && n < table->size() ? (*table)[n] : pi.lambda_at(n);
    cplx base = lam * (v * w / std::sqrt((double)n));
    for (size_t i = 0; i < fq.size(); ++i) {
      u64 q = fq[i].value;
      u64 r = n % q;
      if (q > 1 && std::gcd(r, q) != 1) continue;
      u64 res = sign > 0 ? r : (q - r) % q;
      out.value +=
          base * (double)dirichlet::primitive_char_sum_divisor_side(fq[i], res);
      if (res == 1 % q) out.main_term += base * phi[i];
      if (cross_check)
        out.direct +=
            base * dirichlet::primitive_char_sum_character_side(*groups[i], res);
    }
  }
  return out;
}

inline BandPiece dual_piece(const CoeffProvider& pi,
                            const std::vector<u64>& moduli, int sign,
                            double band, const SmoothWindow& V,
                            const AfeWeight& W2, double scale,
                            bool cross_check = false,
                            const std::vector<cplx>* table = nullptr) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  if (!(band > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("band and scale must be positive");
  BandPiece out;
  out.cross_checked = cross_check;

  struct QCtx {
    Factored fq;
    std::vector<cplx> transform;  // fourth-power transform over residues
    cplx front;                   // sqrt(q) c_pi w(q)
    std::unique_ptr<dirichlet::CharacterGroup> G;
    std::vector<cplx> eps_signed;  // chi(sign 1) eps(pi, chi) per primitive
    std::vector<dirichlet::Character> bars;
  };
  std::vector<QCtx> ctx;
  for (u64 q : moduli) {
    QCtx c;
    c.fq = arith::factorize(q);
    if (std::gcd(q, pi.conductor()) != 1)
      throw std::invalid_argument(
          "twisting modulus shares a factor with the conductor");
    c.transform = expsums::t_k_array(c.fq, 4);
    c.front = std::sqrt((double)q) * pi.c_pi() * pi.w(q);
    if (cross_check) {
      c.G = std::make_unique<dirichlet::CharacterGroup>(c.fq);
      for (u64 idx : c.G->primitive_indices()) {
        auto chi = c.G->character(idx);
        cplx eps = expsums::root_number_of(pi, *c.G, chi);
        double sgn = sign > 0 ? 1.0 : (double)c.G->parity(chi);
        c.eps_signed.push_back(eps * sgn);
        c.bars.push_back(c.G->character(c.G->conjugate_index(idx)));
      }
    }
    ctx.push_back(std::move(c));
  }
  u64 npi = pi.conductor();
  u64 lo = std::max<u64>(1, (u64)std::ceil(band * V.lo));
  u64 hi = (u64)std::floor(band * V.hi);
  for (u64 m = lo; m <= hi; ++m) {
    double v = V.f((double)m / band);
    if (v == 0.0) continue;
    double w = W2((double)m / scale);
    cplx lam = table && m < table->size() ? (*table)[m] : pi.lambda_at(m);
    cplx base = std::conj(lam) * (v * w / std::sqrt((double)m));
    for (auto& c : ctx) {
      u64 q = c.fq.value;
      u64 r = m % q;
      if (q > 1 && std::gcd(r, q) != 1) continue;
      u64 arg = q == 1 ? 0
                       : arith::mulmod(npi % q, arith::inv_mod(r, q), q);
      u64 res = sign > 0 ? arg : (q - arg) % q;
      out.value += base * c.front * c.transform[res];
      if (cross_check) {
        cplx s{0.0, 0.0};
        for (size_t j = 0; j < c.eps_signed.size(); ++j)
          s += c.eps_signed[j] * c.G->eval(c.bars[j], m);
        out.direct += base * s;
      }
    }
  }
  return out;
}

}  // namespace charsum::lfun
