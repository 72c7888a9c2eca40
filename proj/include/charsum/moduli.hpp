#pragma once
// Factored moduli-set construction and its combinatorial companions: the
// Mobius-phi convolution, exact banded counts, windowed smooth/rough
// classification, divisor-split reduction weights, binomial entropy bounds,
// and the exponent-parameter feasibility checker.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "charsum/arith.hpp"
#include "charsum/autcoeffs.hpp"

namespace charsum::moduli {

using arith::Factored;
using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Profiles.  Desk mode carries explicit dyadic thresholds; paper mode derives
// them as powers of log Q, which at any desk-sized Q puts the second prime
// band beyond every usable prime (the enumeration then reports emptiness
// rather than silently returning nothing).

struct ModuliProfile {
  bool paper_mode = false;
  double Q = 0;

  // exponent parameters; required in paper mode, optional bookkeeping in desk
  double delta = 0, nu = 0, kappa = 0, eps = 0;

  // desk-mode thresholds: prime bands [p1, 2 p1) and [p2, 2 p2), and the
  // rough cutoff z that every prime of the cofactor m must exceed
  double p1 = 0, p2 = 0, z = 0;
  int max_omega = 0;

  u64 f = 1;     // members must be coprime to f
  u64 n_pi = 1;  // and to the conductor

  // relaxations of the paper-mode invariants, filled in by validate_profile
  std::vector<std::string> recorded_overrides;

  double lnln_q() const { return std::log(std::log(Q)); }
  double ln_p1() const {
    return paper_mode ? kappa * nu * lnln_q() : std::log(p1);
  }
  double ln_p2() const { return paper_mode ? 1e4 * lnln_q() : std::log(p2); }
  double ln_z() const { return paper_mode ? 2e4 * lnln_q() : std::log(z); }
  int omega_cap() const {
    return paper_mode ? (int)std::floor(delta * lnln_q()) + 10 : max_omega;
  }
};

inline void validate_profile(ModuliProfile& P) {
  if (!(P.Q >= 2.0))
    throw std::invalid_argument("profile: Q must be at least 2");
  if (P.f < 1 || P.n_pi < 1)
    throw std::invalid_argument("profile: coprimality targets must be >= 1");
  P.recorded_overrides.clear();
  if (P.paper_mode) {
    if (!(0 < P.eps && P.eps < P.delta && P.delta < P.nu && P.nu < 1e-3))
      throw std::invalid_argument(
          "profile: paper mode needs 0 < eps < delta < nu < 1/1000");
    if (!(P.kappa > 0))
      throw std::invalid_argument("profile: paper mode needs kappa > 0");
  } else {
    if (!(P.p1 >= 1 && P.p2 >= 1 && P.z > 0))
      throw std::invalid_argument("profile: desk mode needs p1, p2, z set");
    if (P.max_omega < 0)
      throw std::invalid_argument("profile: max_omega must be >= 0");
    P.recorded_overrides.push_back(
        "explicit dyadic thresholds in place of log-power scales");
    if (!(0 < P.eps && P.eps < P.delta && P.delta < P.nu && P.nu < 1e-3))
      P.recorded_overrides.push_back(
          "exponent chain 0 < eps < delta < nu < 1/1000 not enforced");
  }
  // structural band ordering: the p1 band must end below the p2 band, and
  // the p2 band below the rough cutoff
  double l2 = std::log(2.0);
  if (!(2.0 * l2 + P.ln_p1() < l2 + P.ln_p2() && l2 + P.ln_p2() < P.ln_z()))
    throw std::invalid_argument("profile: need 4*P1 < 2*P2 < z");
}

struct ModuliMember {
  Factored q;
  u64 p1 = 0, p2 = 0, m = 1;  // witness decomposition q = p1 * p2 * m
};

struct ModuliSet {
  ModuliProfile profile;
  std::vector<ModuliMember> members;
  std::string empty_reason;  // nonempty exactly when members is empty
};

namespace detail {

// primes in the dyadic band [e^lnlo, 2 e^lnlo), empty when the band starts
// beyond the exhaustive search limit
inline std::vector<u64> band_primes(double lnlo, double limit) {
  if (lnlo > std::log(limit)) return {};
  double lo = std::exp(lnlo), hi = 2.0 * std::exp(lnlo);
  u64 a = (u64)std::ceil(lo - 1e-9);
  u64 b = (u64)std::ceil(std::min(hi, limit + 1.0) - 1e-9);
  if (a < 2) a = 2;
  if (b <= a) return {};
  return arith::primes_in(a, b);
}

inline bool coprime_to(u64 n, u64 f, u64 np) {
  return std::gcd(n, f) == 1 && std::gcd(n, np) == 1;
}

}  // namespace detail

// Exhaustive enumeration of the members q = p1 * p2 * m with p1, p2 in their
// dyadic prime bands and m in [M, 2M) for M = Q / (P1 P2), m squarefree with
// at most the capped number of prime factors, all larger than z.
inline ModuliSet build_moduli(ModuliProfile profile) {
  validate_profile(profile);
  if (profile.Q > 1e6)
    throw std::invalid_argument("build_moduli: exhaustive budget is Q <= 1e6");
  ModuliSet S;
  S.profile = profile;

  const double kPrimeLimit = 2e6;
  auto band1 = detail::band_primes(profile.ln_p1(), kPrimeLimit);
  auto band2 = detail::band_primes(profile.ln_p2(), kPrimeLimit);
  std::erase_if(band1, [&](u64 p) {
    return !detail::coprime_to(p, profile.f, profile.n_pi);
  });
  std::erase_if(band2, [&](u64 p) {
    return !detail::coprime_to(p, profile.f, profile.n_pi);
  });

  // cofactor band, independent of which band primes get chosen
  double ln_m = std::log(profile.Q) - profile.ln_p1() - profile.ln_p2();
  std::vector<std::pair<u64, Factored>> cofactors;
  if (ln_m >= std::log(kPrimeLimit)) {
    S.empty_reason = "cofactor band lies beyond the enumeration limit";
    return S;
  }
  if (ln_m > -700.0) {
    double M = std::exp(ln_m);
    u64 lo = (u64)std::ceil(M - 1e-9);
    u64 hi = (u64)std::ceil(2.0 * M - 1e-9);  // half-open [M, 2M)
    if (lo < 1) lo = 1;
    for (u64 m = lo; m < hi; ++m) {
      auto fm = arith::factorize(m);
      if (!fm.is_squarefree()) continue;
      if (fm.omega() > profile.omega_cap()) continue;
      bool rough = true;
      for (auto& [p, e] : fm.factors)
        if (std::log((double)p) <= profile.ln_z()) rough = false;
      if (!rough) continue;
      if (!detail::coprime_to(m, profile.f, profile.n_pi)) continue;
      cofactors.emplace_back(m, std::move(fm));
    }
  }

  if (band1.empty() || band2.empty() || cofactors.empty()) {
    std::string why;
    if (band1.empty()) why += "no usable prime in the first band; ";
    if (band2.empty()) why += "no usable prime in the second band; ";
    if (cofactors.empty()) why += "no admissible cofactor in its band; ";
    why.resize(why.size() - 2);
    S.empty_reason = why;
    return S;
  }

  double q_lo = profile.Q / 16.0, q_hi = 16.0 * profile.Q;
  for (u64 a : band1)
    for (u64 b : band2)
      for (auto& [m, fm] : cofactors) {
        u64 q = a * b * m;
        if ((double)q < q_lo || (double)q > q_hi) continue;
        ModuliMember mem;
        mem.p1 = a;
        mem.p2 = b;
        mem.m = m;
        mem.q.value = q;
        mem.q.factors.push_back({a, 1});
        mem.q.factors.push_back({b, 1});
        for (auto& pe : fm.factors) mem.q.factors.push_back(pe);
        S.members.push_back(std::move(mem));
      }

  std::sort(S.members.begin(), S.members.end(),
            [](const ModuliMember& x, const ModuliMember& y) {
              return x.q.value < y.q.value;
            });
  if (S.members.empty())
    S.empty_reason = "every candidate fell outside [Q/16, 16Q]";
  return S;
}

// Re-checks every constructed member against the full member contract.
inline void validate_members(const ModuliSet& S) {
  const ModuliProfile& P = S.profile;
  auto in_band = [](double lnp, double lnlo) {
    return lnlo - 1e-9 <= lnp && lnp < lnlo + std::log(2.0) + 1e-9;
  };
  for (const auto& mem : S.members) {
    u64 prod = 1;
    for (auto& [p, e] : mem.q.factors) {
      if (e != 1) throw std::logic_error("member is not squarefree");
      for (int i = 0; i < e; ++i) prod *= p;
    }
    if (prod != mem.q.value || mem.q.value != mem.p1 * mem.p2 * mem.m)
      throw std::logic_error("member witness does not multiply back");
    if (!in_band(std::log((double)mem.p1), P.ln_p1()) ||
        !in_band(std::log((double)mem.p2), P.ln_p2()))
      throw std::logic_error("band prime escaped its dyadic band");
    auto fm = arith::factorize(mem.m);
    if (!fm.is_squarefree() || fm.omega() > P.omega_cap())
      throw std::logic_error("cofactor fails its shape constraints");
    for (auto& [p, e] : fm.factors)
      if (std::log((double)p) <= P.ln_z())
        throw std::logic_error("cofactor carries a small prime");
    if (std::gcd(mem.q.value, P.f) != 1 || std::gcd(mem.q.value, P.n_pi) != 1)
      throw std::logic_error("member shares a factor with f or the conductor");
    if ((double)mem.q.value < P.Q / 16.0 || (double)mem.q.value > 16.0 * P.Q)
      throw std::logic_error("member escaped [Q/16, 16Q]");
  }
}

// ---------------------------------------------------------------------------
// Mobius-phi convolution: sum over n = c d of mu(c) phi(d).  Multiplicative,
// with value p - 2 at primes and p^{e-2} (p-1)^2 at higher prime powers.

inline i64 mobius_phi_convolution(const Factored& n) {
  i64 r = 1;
  for (auto& [p, e] : n.factors) {
    if (e == 1) {
      r *= (i64)p - 2;
    } else {
      i64 loc = ((i64)p - 1) * ((i64)p - 1);
      for (int i = 2; i < e; ++i) loc *= (i64)p;
      r *= loc;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exact banded count: the sum of the convolution over m in [M, 2M) that are
// squarefree, have at most max_omega prime factors, all exceeding w.  The
// predicted exponent pairs the count with the asymptotic it is tracking; it
// is a diagnostic only, never an accuracy claim.

struct DelangeCount {
  i64 exact = 0;
  u64 matched = 0;
  double predicted_exponent = -1.0;
};

inline DelangeCount selberg_delange_count(double M, int max_omega, double w) {
  if (!(M >= 1.0))
    throw std::invalid_argument("selberg_delange_count: M must be >= 1");
  if (M > 1e7)
    throw std::invalid_argument(
        "selberg_delange_count: exhaustive budget is M <= 1e7");
  u64 lo = (u64)std::ceil(M - 1e-9);
  u64 hi = (u64)std::ceil(2.0 * M - 1e-9);
  if (lo < 1) lo = 1;

  DelangeCount out;
  auto ps = arith::primes_up_to((u64)std::sqrt((double)hi) + 2);
  const u64 kBlock = 1 << 18;
  std::vector<u64> rem(kBlock);
  std::vector<i64> conv(kBlock);
  std::vector<unsigned char> om(kBlock), bad(kBlock);
  for (u64 a = lo; a < hi; a += kBlock) {
    u64 b = std::min(hi, a + kBlock);
    u64 len = b - a;
    for (u64 i = 0; i < len; ++i) {
      rem[i] = a + i;
      conv[i] = 1;
      om[i] = 0;
      bad[i] = 0;
    }
    for (u64 p : ps) {
      u64 start = (a + p - 1) / p * p;
      for (u64 v = start; v < b; v += p) {
        u64 i = v - a;
        int e = 0;
        while (rem[i] % p == 0) {
          rem[i] /= p;
          ++e;
        }
        if (e > 1 || (double)p <= w) bad[i] = 1;
        om[i] += 1;
        conv[i] *= (i64)p - 2;
      }
    }
    for (u64 i = 0; i < len; ++i) {
      if (rem[i] > 1) {
        if ((double)rem[i] <= w) bad[i] = 1;
        om[i] += 1;
        conv[i] *= (i64)rem[i] - 2;
      }
      if (!bad[i] && om[i] <= max_omega) {
        out.exact += conv[i];
        out.matched += 1;
      }
    }
  }

  // exponent of the asymptotic count under the omega cap, read off from
  // max_omega = d loglog(M) + 10
  double ll = std::log(std::max(std::log(std::max(M, 3.0)), 1.1));
  double d = std::max(0.0, (double)(max_omega - 10)) / ll;
  out.predicted_exponent = d > 0 ? -1.0 + d + d * std::log(1.0 / d) : -1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Windowed classification.  A window prime wins outright; otherwise a large
// sub-window smooth part; otherwise the integer counts as exceptional.

enum class RoughTag { kWindowPrime, kHeavySmoothPart, kExceptional };

inline const char* tag_name(RoughTag t) {
  switch (t) {
    case RoughTag::kWindowPrime: return "window-prime";
    case RoughTag::kHeavySmoothPart: return "heavy-smooth-part";
    default: return "exceptional";
  }
}

inline RoughTag classify_smooth_rough(u64 n, double y_lo, double y_hi,
                                      double u_threshold) {
  if (!(y_lo < y_hi))
    throw std::invalid_argument("classify: window needs y_lo < y_hi");
  auto F = arith::factorize(n);
  u64 smooth = 1;
  for (auto& [p, e] : F.factors) {
    if ((double)p >= y_lo && (double)p <= y_hi) return RoughTag::kWindowPrime;
    if ((double)p < y_lo)
      for (int i = 0; i < e; ++i) smooth *= p;
  }
  return (double)smooth > u_threshold ? RoughTag::kHeavySmoothPart
                                      : RoughTag::kExceptional;
}

// ---------------------------------------------------------------------------
// Reduction weights: lambda(m) divided by one plus the number of distinct
// window primes of m, and zero when a window prime repeats in m.

inline int window_omega(const Factored& F, double y_lo, double y_hi,
                        bool& squarefree_in_window) {
  int w = 0;
  squarefree_in_window = true;
  for (auto& [p, e] : F.factors)
    if ((double)p >= y_lo && (double)p <= y_hi) {
      ++w;
      if (e > 1) squarefree_in_window = false;
    }
  return w;
}

inline cplx alpha_weight(const autcoeffs::CoeffProvider& pi, u64 m,
                         double y_lo, double y_hi) {
  if (!(y_lo < y_hi))
    throw std::invalid_argument("alpha_weight: window needs y_lo < y_hi");
  auto F = arith::factorize(m);
  bool sq = true;
  int w = window_omega(F, y_lo, y_hi, sq);
  if (!sq) return {0.0, 0.0};
  return pi.lambda_at(m) / (double)(1 + w);
}

// The divisor-split identity: lambda(n), restricted to n squarefree in the
// window and carrying at least one window prime, equals the sum over exact
// window-prime divisors p of lambda(p) alpha(n/p).  Returns |LHS - RHS|.
inline double reduction_identity_check(const autcoeffs::CoeffProvider& pi,
                                       u64 n, double y_lo, double y_hi) {
  if (!(y_lo < y_hi))
    throw std::invalid_argument("reduction check: window needs y_lo < y_hi");
  auto F = arith::factorize(n);
  bool sq = true;
  int w = window_omega(F, y_lo, y_hi, sq);
  cplx lhs = (w >= 1 && sq) ? pi.lambda_at(n) : cplx{0.0, 0.0};
  cplx rhs = 0.0;
  for (auto& [p, e] : F.factors) {
    if (!((double)p >= y_lo && (double)p <= y_hi)) continue;
    if (e != 1) continue;  // the split requires (m, p) = 1
    rhs += pi.lambda_pk(p, 1) * alpha_weight(pi, n / p, y_lo, y_hi);
  }
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Exact binomial partial sums against exp(n H(k/n)).

struct EntropyBound {
  boost::multiprecision::cpp_int exact;
  double bound = 0;
};

inline EntropyBound binomial_entropy_bound(int n, int k) {
  if (n < 0 || n > 200)
    throw std::invalid_argument("binomial bound: exact mode needs n <= 200");
  if (k < 0 || 2 * k > n)
    throw std::invalid_argument("binomial bound: needs 0 <= k <= n/2");
  EntropyBound out;
  boost::multiprecision::cpp_int c = 1;
  out.exact = 1;
  for (int j = 1; j <= k; ++j) {
    c = c * (n - j + 1) / j;
    out.exact += c;
  }
  double x = n > 0 ? (double)k / (double)n : 0.0;
  double H = (x <= 0.0 || x >= 1.0)
                 ? 0.0
                 : x * std::log(1.0 / x) + (1.0 - x) * std::log(1.0 / (1.0 - x));
  out.bound = std::exp((double)n * H);
  return out;
}

// ---------------------------------------------------------------------------
// Feasibility of the exponent parameters.  Two main inequalities plus the
// side conditions they were derived under; every slack is reported so a
// failure names its culprit.

struct FeasibilityReport {
  double main_log_slack = 0;   // (d/2) log(1/d) minus the first left side
  double main_band_slack = 0;  // (kappa/4) nu minus the second left side
  double side_c_delta = 0;     // 10^3 - C d
  double side_kappa_nu = 0;    // 10^3 - kappa nu
  bool eps_in_unit = false;
  bool chain_ok = false;  // eps <= delta < nu < 1/1000 (equality allowed:
                          // the recommended schema sits at eps = delta)
  bool feasible = false;
};

inline FeasibilityReport parameter_feasibility(double delta, double nu,
                                               double eps, double kappa,
                                               double C) {
  if (!(delta > 0 && nu > 0 && eps > 0 && kappa > 0 && C > 0))
    throw std::invalid_argument("feasibility: all parameters must be > 0");
  FeasibilityReport r;
  r.main_log_slack = 0.5 * delta * std::log(1.0 / delta) -
                     (2.0 * eps + (100.0 + kappa / 2.0) * nu +
                      (C + 0.5 + 1e9) * delta);
  r.main_band_slack =
      0.25 * kappa * nu - (2.0 * eps + (1.0 + 1e9 + C) * delta);
  r.side_c_delta = 1e3 - C * delta;
  r.side_kappa_nu = 1e3 - kappa * nu;
  r.eps_in_unit = eps < 1.0;
  r.chain_ok = eps <= delta && delta < nu && nu < 1e-3;
  r.feasible = r.main_log_slack > 0 && r.main_band_slack > 0 &&
               r.side_c_delta > 0 && r.side_kappa_nu > 0 && r.eps_in_unit &&
               r.chain_ok;
  return r;
}

// The recommended one-parameter family eps = delta, nu = delta sqrt(L) with
// L = log(1/delta).  delta underflows double long before feasibility, so the
// search runs on L with both main inequalities divided through by delta
// (exact: they are linear in it).
struct SchemaPoint {
  double big_l = 0;  // log(1/delta) at the found point
  double slack_log_per_delta = 0;
  double slack_band_per_delta = 0;
  bool feasible = false;
};

inline SchemaPoint schema_feasibility_search(double kappa, double C) {
  if (!(kappa > 0 && C > 0))
    throw std::invalid_argument("schema search: kappa, C must be > 0");
  auto f_log = [&](double L) {
    return 0.5 * L - (2.0 + (100.0 + kappa / 2.0) * std::sqrt(L) + C + 0.5 + 1e9);
  };
  auto f_band = [&](double L) {
    return 0.25 * kappa * std::sqrt(L) - (3.0 + 1e9 + C);
  };
  auto g = [&](double L) { return std::min(f_log(L), f_band(L)); };

  double lo = 1.0, hi = 2.0;
  while (g(hi) <= 0) {
    hi *= 2.0;
    if (hi > 1e60) throw std::runtime_error("schema search failed to bracket");
  }
  if (g(lo) > 0) hi = lo;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? hi : lo) = mid;
  }

  SchemaPoint out;
  out.big_l = hi * (1.0 + 1e-6);  // step just inside the feasible side
  out.slack_log_per_delta = f_log(out.big_l);
  out.slack_band_per_delta = f_band(out.big_l);
  // remaining conditions, checked in log space: delta = e^{-L} makes
  // C delta and kappa nu microscopic, and nu = delta sqrt(L) < 1/1000
  double ln_nu = -out.big_l + 0.5 * std::log(out.big_l);
  out.feasible = out.slack_log_per_delta > 0 && out.slack_band_per_delta > 0 &&
                 out.big_l > 1.0 && ln_nu < std::log(1e-3);
  return out;
}

// ---------------------------------------------------------------------------
// Flat profile files: `key = value` lines, '#' comments, optional quotes.
// Tables and arrays are deliberately unsupported; profiles are scalars.

inline std::map<std::string, std::string> read_flat_profile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[')
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": tables are not supported");
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    if (key.empty() || val.empty())
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": empty key or value");
    if (kv.count(key))
      throw std::runtime_error(path + ": duplicate key " + key);
    kv[key] = val;
  }
  return kv;
}

inline ModuliProfile load_profile(const std::string& path) {
  auto kv = read_flat_profile(path);
  ModuliProfile P;
  auto take = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::string();
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const std::string& v, const char* key) {
    try {
      size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": key " + key +
                               " needs a numeric value, got '" + v + "'");
    }
  };

  std::string mode = take("mode");
  if (mode.empty()) mode = "desk";
  if (mode != "desk" && mode != "paper")
    throw std::runtime_error(path + ": mode must be desk or paper");
  P.paper_mode = mode == "paper";

  std::string q = take("Q");
  if (q.empty()) throw std::runtime_error(path + ": missing key Q");
  P.Q = num(q, "Q");

  struct Slot {
    const char* key;
    double* dst;
  };
  for (auto [key, dst] : {Slot{"delta", &P.delta}, Slot{"nu", &P.nu},
                          Slot{"kappa", &P.kappa}, Slot{"eps", &P.eps},
                          Slot{"P1", &P.p1}, Slot{"P2", &P.p2},
                          Slot{"z", &P.z}}) {
    std::string v = take(key);
    if (!v.empty()) *dst = num(v, key);
  }
  const std::pair<const char*, u64*> uslots[] = {{"f", &P.f},
                                                 {"N_pi", &P.n_pi}};
  for (auto& [key, dst] : uslots) {
    std::string v = take(key);
    if (!v.empty()) *dst = (u64)std::llround(num(v, key));
  }
  std::string mo = take("max_omega");
  if (!mo.empty()) P.max_omega = (int)std::llround(num(mo, "max_omega"));

  if (!kv.empty())
    throw std::runtime_error(path + ": unknown key " + kv.begin()->first);
  validate_profile(P);
  return P;
}

}  // namespace charsum::moduli
