#pragma once

// Coefficient providers for degree-4 L-functions.
//
// A provider hands out local Satake parameters per prime plus the global
// data (gamma shifts, conductor, sign) the analytic layer needs.  Two
// built-in constructions cover the use cases here: the symmetric cube of
// a GL(2) form and the Rankin product of two GL(2) forms.  A small file
// format allows explicit local data to be loaded for experiments.
//
// Coefficients at prime powers always go through the degree-4 Hecke
// recurrence
//
//   h_k = e1 h_{k-1} - e2 h_{k-2} + e3 h_{k-3} - e4 h_{k-4},
//
// where e_i are the elementary symmetric functions of the Satake
// parameters and h_k = lambda(p^k).

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/tau.hpp"

namespace charsum::autcoeffs {

using arith::u64;
using cplx = std::complex<double>;

struct coefficient_gap : std::runtime_error {
  u64 prime;
  explicit coefficient_gap(u64 p)
      : std::runtime_error("no coefficient data for prime " +
                           std::to_string(p)),
        prime(p) {}
};

// ---------------------------------------------------------------------------
// provider interface

class CoeffProvider {
 public:
  virtual ~CoeffProvider() = default;

  virtual std::string name() const = 0;
  virtual u64 conductor() const = 0;
  virtual std::array<cplx, 4> mu() const = 0;  // gamma-factor shifts
  virtual cplx c_pi() const = 0;               // sign constant
  virtual cplx w(u64 /*q*/) const { return {1.0, 0.0}; }
  virtual bool self_dual() const = 0;
  virtual u64 prime_limit() const = 0;  // satake() valid for p < limit
  virtual std::array<cplx, 4> satake(u64 p) const = 0;

  std::vector<u64> ramified() const {
    std::vector<u64> out;
    for (auto& [p, e] : arith::factorize(conductor()).factors) out.push_back(p);
    return out;
  }

  std::array<cplx, 4> elementary(u64 p) const {
    auto a = satake(p);
    cplx e1 = a[0] + a[1] + a[2] + a[3];
    cplx e2 = a[0] * a[1] + a[0] * a[2] + a[0] * a[3] + a[1] * a[2] +
              a[1] * a[3] + a[2] * a[3];
    cplx e3 = a[0] * a[1] * a[2] + a[0] * a[1] * a[3] + a[0] * a[2] * a[3] +
              a[1] * a[2] * a[3];
    cplx e4 = a[0] * a[1] * a[2] * a[3];
    return {e1, e2, e3, e4};
  }

  cplx lambda_pk(u64 p, int k) const {
    if (k < 0) throw std::invalid_argument("negative prime-power exponent");
    auto e = elementary(p);
    std::vector<cplx> h((size_t)k + 1);
    h[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
      cplx v = e[0] * h[j - 1];
      if (j >= 2) v -= e[1] * h[j - 2];
      if (j >= 3) v += e[2] * h[j - 3];
      if (j >= 4) v -= e[3] * h[j - 4];
      h[j] = v;
    }
    return h[k];
  }

  cplx lambda_at(u64 n) const {
    if (n == 0) throw std::invalid_argument("lambda_at(0)");
    cplx out = 1.0;
    for (auto& [p, e] : arith::factorize(n).factors) out *= lambda_pk(p, e);
    return out;
  }
};

// ---------------------------------------------------------------------------
// GL(2) eigenvalue sources

struct GL2Source {
  std::string name;
  u64 limit = 0;                       // eigenvalues available for p < limit
  std::function<double(u64)> lam;      // normalized Hecke eigenvalue at p
};

inline GL2Source delta_source() {
  return {"delta", tau::kTabLimit,
          [](u64 p) { return tau::delta_table().at(p); }};
}

inline GL2Source delta16_source(u64 limit = 4096) {
  auto tab = std::make_shared<std::vector<double>>(limit, 0.0);
  auto a16 = tau::exact_weight16_upto(limit);
  for (u64 n = 1; n < limit; ++n)
    (*tab)[n] = (double)((long double)a16[n] /
                         std::pow((long double)n, 7.5L));
  return {"delta16", limit, [tab, limit](u64 p) {
            if (p >= limit) throw coefficient_gap(p);
            return (*tab)[p];
          }};
}

namespace detail {

// unit-circle Satake pair of a GL(2) eigenvalue: alpha + 1/alpha = lam
inline cplx gl2_alpha(double lam) {
  double half = lam / 2.0;
  double disc = 1.0 - half * half;
  if (disc < 0) disc = 0;  // eigenvalues here satisfy |lam| <= 2
  return {half, std::sqrt(disc)};
}

class Sym3Provider final : public CoeffProvider {
 public:
  explicit Sym3Provider(GL2Source src) : src_(std::move(src)) {}

  std::string name() const override { return "sym3-" + src_.name; }
  u64 conductor() const override { return 1; }
  std::array<cplx, 4> mu() const override {
    return {cplx(5.5), cplx(6.5), cplx(16.5), cplx(17.5)};
  }
  // sign constant; -1 is forced: the balanced central-value evaluation is
  // only splitting-scale invariant with this choice
  cplx c_pi() const override { return {-1.0, 0.0}; }
  bool self_dual() const override { return true; }
  u64 prime_limit() const override { return src_.limit; }

  std::array<cplx, 4> satake(u64 p) const override {
    if (p >= src_.limit) throw coefficient_gap(p);
    cplx a = gl2_alpha(src_.lam(p));
    cplx b = std::conj(a);
    return {a * a * a, a, b, b * b * b};
  }

 private:
  GL2Source src_;
};

class RankinProvider final : public CoeffProvider {
 public:
  RankinProvider(GL2Source s1, GL2Source s2)
      : s1_(std::move(s1)), s2_(std::move(s2)) {}

  std::string name() const override {
    return "rankin-" + s1_.name + "-" + s2_.name;
  }
  u64 conductor() const override { return 1; }
  std::array<cplx, 4> mu() const override {
    // weights 12 and 16: shifts (k1+k2)/2 - 1 and |k1-k2|/2, doubled
    return {cplx(2.0), cplx(3.0), cplx(13.0), cplx(14.0)};
  }
  cplx c_pi() const override { return {1.0, 0.0}; }
  bool self_dual() const override { return true; }
  u64 prime_limit() const override { return std::min(s1_.limit, s2_.limit); }

  std::array<cplx, 4> satake(u64 p) const override {
    if (p >= prime_limit()) throw coefficient_gap(p);
    cplx a1 = gl2_alpha(s1_.lam(p)), b1 = std::conj(a1);
    cplx a2 = gl2_alpha(s2_.lam(p)), b2 = std::conj(a2);
    return {a1 * a2, a1 * b2, b1 * a2, b1 * b2};
  }

 private:
  GL2Source s1_, s2_;
};

}  // namespace detail

inline std::unique_ptr<CoeffProvider> sym3_provider(GL2Source src) {
  return std::make_unique<detail::Sym3Provider>(std::move(src));
}

inline std::unique_ptr<CoeffProvider> rankin_provider(GL2Source s1,
                                                      GL2Source s2) {
  return std::make_unique<detail::RankinProvider>(std::move(s1),
                                                  std::move(s2));
}

inline const CoeffProvider& sym3_delta() {
  static detail::Sym3Provider P{delta_source()};
  return P;
}

inline const CoeffProvider& rankin_delta_pair() {
  static detail::RankinProvider P{delta_source(), delta16_source()};
  return P;
}

// ---------------------------------------------------------------------------
// power sums and local diagnostics

// a(p^l) = sum of l-th powers of the Satake parameters, computed directly
// and reconstructed from the lambda(p^k) through the Newton-style relation
//   a_l = l h_l - sum_{i<l} a_i h_{l-i};
// the two must agree.
inline cplx power_sum(const CoeffProvider& pi, u64 p, int ell) {
  if (ell < 1 || ell > 12) throw std::invalid_argument("power index out of range");
  auto al = pi.satake(p);
  auto e = pi.elementary(p);
  std::vector<cplx> h((size_t)ell + 1), a((size_t)ell + 1);
  h[0] = 1.0;
  for (int j = 1; j <= ell; ++j) {
    cplx v = e[0] * h[j - 1];
    if (j >= 2) v -= e[1] * h[j - 2];
    if (j >= 3) v += e[2] * h[j - 3];
    if (j >= 4) v -= e[3] * h[j - 4];
    h[j] = v;
  }
  cplx direct = 0.0;
  for (int j = 0; j < 4; ++j) direct += std::pow(al[j], (double)ell);
  for (int l = 1; l <= ell; ++l) {
    cplx v = (double)l * h[l];
    for (int i = 1; i < l; ++i) v -= a[i] * h[l - i];
    a[l] = v;
  }
  if (std::abs(a[ell] - direct) > 1e-9 * (1.0 + std::abs(direct)))
    throw std::runtime_error("power-sum reconstruction mismatch at p=" +
                             std::to_string(p));
  return direct;
}

// second elementary symmetric function of the local parameters
inline cplx exterior_square_coeff(const std::array<cplx, 4>& a) {
  return a[0] * a[1] + a[0] * a[2] + a[0] * a[3] + a[1] * a[2] + a[1] * a[3] +
         a[2] * a[3];
}

inline cplx exterior_square_coeff(const CoeffProvider& pi, u64 p) {
  return exterior_square_coeff(pi.satake(p));
}

// trichotomy of a unitary local parameter set: all on the unit circle,
// one reciprocal pair off it, or two pairs off it
struct SatakeClass {
  char tag = 'a';  // 'a', 'b' or 'c'
  double t = 0.0;
  double s = 0.0;
};

inline SatakeClass satake_classify(const std::array<cplx, 4>& a, u64 p) {
  for (int i = 0; i < 4; ++i) {
    cplx want = 1.0 / std::conj(a[i]);
    double best = 1e300;
    for (int j = 0; j < 4; ++j) best = std::min(best, std::abs(a[j] - want));
    if (best > 1e-8 * (1.0 + std::abs(want)))
      throw std::runtime_error(
          "local parameters not closed under inversion-conjugation");
  }
  std::vector<double> above;
  for (auto& z : a) {
    double r = std::abs(z);
    if (r > 1.0 + 1e-8) above.push_back(std::log(r) / std::log((double)p));
  }
  std::sort(above.rbegin(), above.rend());
  SatakeClass c;
  if (above.empty()) {
    c.tag = 'a';
  } else if (above.size() == 1) {
    c.tag = 'b';
    c.t = above[0];
  } else if (above.size() == 2) {
    c.tag = 'c';
    c.t = above[0];
    c.s = above[1];
  } else {
    throw std::runtime_error("more than two off-circle reciprocal pairs");
  }
  return c;
}

// envelope for |sum of l-th powers| at an unramified prime
inline double power_sum_envelope(u64 p, int ell) {
  return 4.0 * std::pow((double)p, ell * (0.5 - 1.0 / 11.0)) * (1.0 + 1e-6);
}

// short prime sum sum_{x <= p < 2x, p = a mod q} lambda(p) p^{it}
inline cplx sw_prime_sum(const CoeffProvider& pi, u64 x, u64 q, u64 a,
                         double t) {
  if (q == 0 || std::gcd(a % q, q) != (u64)1)
    throw std::invalid_argument("residue class not invertible");
  cplx out = 0.0;
  for (u64 p : arith::primes_in(x, 2 * x)) {
    if (p % q != a % q) continue;
    double lp = std::log((double)p);
    out += pi.lambda_pk(p, 1) * cplx(std::cos(t * lp), std::sin(t * lp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// dense coefficient table: lambda(n) for n <= N by a smallest-prime-factor
// sieve, with provider calls only at prime powers

inline std::vector<cplx> coeff_table(const CoeffProvider& pi, u64 N) {
  std::vector<uint32_t> spf(N + 1, 0);
  for (u64 i = 2; i <= N; ++i) {
    if (spf[i]) continue;
    for (u64 j = i; j <= N; j += i)
      if (!spf[j]) spf[j] = (uint32_t)i;
  }
  std::vector<cplx> lam(N + 1, 0.0);
  if (N >= 1) lam[1] = 1.0;
  for (u64 n = 2; n <= N; ++n) {
    u64 p = spf[n], m = n;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    lam[n] = m == 1 ? pi.lambda_pk(p, e) : lam[n / m] * lam[m];
  }
  return lam;
}

// ---------------------------------------------------------------------------
// averaged coefficient-size diagnostics

struct RankinReport {
  double prime_power_sum = 0, prime_power_env = 0;    // sum |l(p^k)|^2 / p^k
  double fourth_moment_sum = 0, fourth_moment_env = 0;  // sum |l(p)|^4 / p^2
  double full_sum = 0, full_lo = 0, full_hi = 0;      // sum_{n<=X} |l(n)|^2/n
  bool pass() const {
    return prime_power_sum <= prime_power_env &&
           fourth_moment_sum <= fourth_moment_env && full_sum >= full_lo &&
           full_sum <= full_hi;
  }
};

inline RankinReport rankin_diagnostics(const CoeffProvider& pi, u64 P, u64 N,
                                       int k, u64 X) {
  if (P < 2 || N <= P || k < 1 || X < 2)
    throw std::invalid_argument("bad diagnostic ranges");
  RankinReport r;
  for (u64 p : arith::primes_in(P, N + 1)) {
    double pk = std::pow((double)p, (double)k);
    r.prime_power_sum += std::norm(pi.lambda_pk(p, k)) / pk;
    double n1 = std::norm(pi.lambda_pk(p, 1));
    r.fourth_moment_sum += n1 * n1 / ((double)p * (double)p);
  }
  r.prime_power_env = 100.0 * std::pow((double)P, -1.0 / 11.0) * std::log((double)N);
  r.fourth_moment_env = 100.0 * std::pow((double)P, -2.0 / 11.0) * std::log((double)N);
  auto lam = coeff_table(pi, X);
  for (u64 n = 1; n <= X; ++n) r.full_sum += std::norm(lam[n]) / (double)n;
  r.full_lo = 0.1 * std::log((double)X);
  r.full_hi = 100.0 * std::log((double)X);
  return r;
}

// ---------------------------------------------------------------------------
// explicit local data from a file
//
//   #LFUNC v1
//   name=my-form
//   degree=4
//   conductor=1
//   mu=0.5,1.5,2.5,3.5
//   c_pi=1
//   mode=satake            (satake | lambda | gl2-sym3 | gl2-pair)
//   2 0.6+0.8i 0.6-0.8i 0.6+0.8i 0.6-0.8i
//
// body lines give a prime and then 4 (satake: the parameters;
// lambda: lambda(p^1..p^4)), 1 (gl2-sym3) or 2 (gl2-pair) values.

inline cplx parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace((unsigned char)c)) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty number");
  auto parse_real = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing junk in number");
    return v;
  };
  if (s.back() != 'i') return {parse_real(s), 0.0};
  std::string body = s.substr(0, s.size() - 1);
  // split at the last +/- that is not a leading sign or exponent sign
  size_t split = std::string::npos;
  for (size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') &&
        body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(body)};
  return {parse_real(body.substr(0, split)), parse_real(body.substr(split))};
}

namespace detail {

// roots of z^4 - e1 z^3 + e2 z^2 - e3 z + e4 by simultaneous iteration
inline std::array<cplx, 4> quartic_roots(cplx e1, cplx e2, cplx e3, cplx e4) {
  auto f = [&](cplx z) { return (((z - e1) * z + e2) * z - e3) * z + e4; };
  std::array<cplx, 4> r{cplx(1.3, 0.2), cplx(-0.4, 1.1), cplx(-0.9, -0.6),
                        cplx(0.5, -1.2)};
  for (int it = 0; it < 400; ++it) {
    double moved = 0.0;
    for (int i = 0; i < 4; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i) den *= r[i] - r[j];
      if (std::abs(den) < 1e-300) den = 1e-300;
      cplx step = f(r[i]) / den;
      r[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-14) break;
  }
  return r;
}

class FileProvider final : public CoeffProvider {
 public:
  std::string name_;
  u64 conductor_ = 1;
  std::array<cplx, 4> mu_{};
  cplx cpi_{1.0, 0.0};
  std::map<u64, std::array<cplx, 4>> local_;
  bool self_dual_ = true;

  std::string name() const override { return name_; }
  u64 conductor() const override { return conductor_; }
  std::array<cplx, 4> mu() const override { return mu_; }
  cplx c_pi() const override { return cpi_; }
  bool self_dual() const override { return self_dual_; }
  u64 prime_limit() const override {
    return local_.empty() ? 0 : local_.rbegin()->first + 1;
  }
  std::array<cplx, 4> satake(u64 p) const override {
    auto it = local_.find(p);
    if (it == local_.end()) throw coefficient_gap(p);
    return it->second;
  }
};

}  // namespace detail

inline std::unique_ptr<CoeffProvider> file_provider(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient file: " + path);
  auto fail = [&](int line, const std::string& what) {
    throw std::runtime_error(path + ": line " + std::to_string(line) + ": " +
                             what);
  };

  auto P = std::make_unique<detail::FileProvider>();
  std::string line;
  int lineno = 0;
  bool first = true, have_mode = false;
  std::string mode;

  while (std::getline(in, line)) {
    ++lineno;
    if (first) {
      if (line.rfind("#LFUNC", 0) != 0) fail(lineno, "missing #LFUNC marker");
      first = false;
      continue;
    }
    size_t ws = line.find_first_not_of(" \t\r");
    if (ws == std::string::npos) continue;
    if (line[ws] == '#') continue;

    auto eq = line.find('=');
    bool header = eq != std::string::npos &&
                  line.find_first_of(" \t") > eq;  // "key=value", no space before '='
    if (header) {
      std::string key = line.substr(ws, eq - ws);
      std::string val = line.substr(eq + 1);
      while (!val.empty() && (val.back() == '\r' || val.back() == ' '))
        val.pop_back();
      if (key == "name") {
        P->name_ = val;
      } else if (key == "degree") {
        if (val != "4") fail(lineno, "only degree 4 is supported");
      } else if (key == "conductor") {
        P->conductor_ = std::stoull(val);
      } else if (key == "mu") {
        std::stringstream ss(val);
        std::string tok;
        int i = 0;
        while (std::getline(ss, tok, ',')) {
          if (i >= 4) fail(lineno, "mu needs exactly 4 entries");
          P->mu_[i++] = parse_complex(tok);
        }
        if (i != 4) fail(lineno, "mu needs exactly 4 entries");
      } else if (key == "c_pi") {
        P->cpi_ = parse_complex(val);
      } else if (key == "mode") {
        mode = val;
        have_mode = true;
        if (mode != "satake" && mode != "lambda" && mode != "gl2-sym3" &&
            mode != "gl2-pair")
          fail(lineno, "unknown mode: " + mode);
      } else {
        fail(lineno, "unknown header key: " + key);
      }
      continue;
    }

    // body line
    if (!have_mode) fail(lineno, "coefficient line before mode=");
    std::stringstream ss(line);
    u64 p = 0;
    if (!(ss >> p) || !arith::is_prime(p)) fail(lineno, "expected a prime");
    if (P->local_.count(p)) fail(lineno, "duplicate prime " + std::to_string(p));
    std::vector<cplx> vals;
    std::string tok;
    while (ss >> tok) {
      try {
        vals.push_back(parse_complex(tok));
      } catch (const std::exception& e) {
        fail(lineno, e.what());
      }
    }
    size_t want = mode == "gl2-sym3" ? 1 : mode == "gl2-pair" ? 2 : 4;
    if (vals.size() != want)
      fail(lineno, "expected " + std::to_string(want) + " values");

    std::array<cplx, 4> a{};
    if (mode == "satake") {
      for (int i = 0; i < 4; ++i) a[i] = vals[i];
      // unramified prime: parameters must be closed under z -> 1/conj(z)
      if (std::gcd(p, P->conductor_) == 1) {
        for (int i = 0; i < 4; ++i) {
          cplx want_v = 1.0 / std::conj(a[i]);
          double best = 1e300;
          for (int j = 0; j < 4; ++j)
            best = std::min(best, std::abs(a[j] - want_v));
          if (!(best <= 1e-8 * (1.0 + std::abs(want_v))))
            fail(lineno, "non-unitary local parameters");
        }
      }
    } else if (mode == "lambda") {
      // recover elementary symmetric functions from h_1..h_4
      cplx h1 = vals[0], h2 = vals[1], h3 = vals[2], h4 = vals[3];
      cplx e1 = h1;
      cplx e2 = e1 * h1 - h2;
      cplx e3 = h3 - e1 * h2 + e2 * h1;
      cplx e4 = e1 * h3 - e2 * h2 + e3 * h1 - h4;
      if (std::abs(std::abs(e4) - 1.0) > 1e-6)
        fail(lineno, "local determinant is off the unit circle");
      a = detail::quartic_roots(e1, e2, e3, e4);
    } else if (mode == "gl2-sym3") {
      if (std::abs(vals[0].imag()) > 1e-12)
        fail(lineno, "gl2 eigenvalue must be real");
      cplx al = detail::gl2_alpha(vals[0].real());
      cplx be = std::conj(al);
      a = {al * al * al, al, be, be * be * be};
    } else {  // gl2-pair
      for (int i = 0; i < 2; ++i)
        if (std::abs(vals[i].imag()) > 1e-12)
          fail(lineno, "gl2 eigenvalue must be real");
      cplx a1 = detail::gl2_alpha(vals[0].real()), b1 = std::conj(a1);
      cplx a2 = detail::gl2_alpha(vals[1].real()), b2 = std::conj(a2);
      a = {a1 * a2, a1 * b2, b1 * a2, b1 * b2};
    }
    P->local_[p] = a;
    if (std::abs(P->lambda_pk(p, 1).imag()) > 1e-9) P->self_dual_ = false;
  }
  if (first) throw std::runtime_error(path + ": empty file");
  if (!have_mode) throw std::runtime_error(path + ": missing mode=");
  return P;
}

}  // namespace charsum::autcoeffs
