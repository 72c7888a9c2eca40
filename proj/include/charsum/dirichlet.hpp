#pragma once

// Dirichlet character groups over squarefree moduli.
//
// A character mod squarefree q is stored as one exponent per odd prime
// p | q: with g_p the least primitive root mod p,
//
//   chi(x) = prod_p zeta_{p-1}^{e_p * dlog_p(x)} ,  zeta_m = e(1/m).
//
// The prime 2 carries no exponent (the group mod 2 is trivial).  All
// phases are accumulated as exact integers modulo den = lcm_p (p-1), so
// two characters agree exactly iff their phase integers agree; doubles
// enter only through one table of den-th roots of unity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/cache.hpp"

namespace charsum::dirichlet {

using arith::Factored;
using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// discrete logarithms

struct DlogTable {
  u64 p = 0;
  u64 g = 0;                   // least primitive root mod p
  std::vector<uint32_t> dlog;  // size p; dlog[0] = UINT32_MAX sentinel
};

inline u64 least_primitive_root(u64 p) {
  if (p == 2) return 1;
  auto fac = arith::factorize(p - 1);
  for (u64 g = 2; g < p; ++g) {
    bool ok = true;
    for (auto& [ell, e] : fac.factors)
      if (arith::powmod(g, (p - 1) / ell, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found; p not prime?");
}

// Process-wide memo of dlog tables, disk-backed for large primes.
inline const DlogTable& dlog_table(u64 p) {
  static std::map<u64, std::unique_ptr<DlogTable>> memo;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = memo.find(p);
  if (it != memo.end()) return *it->second;

  auto t = std::make_unique<DlogTable>();
  t->p = p;
  std::string rel = "dlog/p" + std::to_string(p) + ".bin";
  std::vector<uint32_t> blob;
  if (p > 256 && cache::load(rel, cache::kKindDlog, p, blob) &&
      blob.size() == p + 1) {
    t->g = blob[0];
    t->dlog.assign(blob.begin() + 1, blob.end());
  } else {
    t->g = least_primitive_root(p);
    t->dlog.assign(p, UINT32_MAX);
    u64 x = 1;
    for (u64 j = 0; j + 1 < p; ++j) {
      t->dlog[x] = (uint32_t)j;
      x = arith::mulmod(x, t->g, p);
    }
    if (p > 256) {
      blob.clear();
      blob.push_back((uint32_t)t->g);
      blob.insert(blob.end(), t->dlog.begin(), t->dlog.end());
      cache::store(rel, cache::kKindDlog, p, blob);
    }
  }
  const DlogTable& ref = *t;
  memo.emplace(p, std::move(t));
  return ref;
}

// ---------------------------------------------------------------------------
// character groups

class CharacterGroup;

struct Character {
  const CharacterGroup* group = nullptr;
  std::vector<u64> e;  // exponent per odd prime factor, e[i] in [0, p_i - 1)
};

class CharacterGroup {
 public:
  explicit CharacterGroup(const Factored& q) : modulus_(q) {
    if (!modulus_.is_squarefree())
      throw std::domain_error("character group requires squarefree modulus");
    den_ = 1;
    for (auto& [p, ex] : modulus_.factors) {
      if (p == 2) continue;
      odd_primes_.push_back(p);
      tables_.push_back(&dlog_table(p));
      den_ = std::lcm(den_, p - 1);
    }
    radix_.resize(odd_primes_.size());
    nchars_ = 1;
    for (size_t i = 0; i < odd_primes_.size(); ++i) {
      radix_[i] = odd_primes_[i] - 1;
      nchars_ *= radix_[i];
    }
    cis_.resize(den_);
    for (u64 j = 0; j < den_; ++j) {
      double th = 2.0 * std::numbers::pi * (double)j / (double)den_;
      cis_[j] = {std::cos(th), std::sin(th)};
    }
  }

  u64 q() const { return modulus_.value; }
  const Factored& modulus() const { return modulus_; }
  u64 size() const { return nchars_; }  // = phi(q) for squarefree q
  u64 phase_denominator() const { return den_; }
  const std::vector<u64>& odd_primes() const { return odd_primes_; }
  cplx root_of_unity(u64 num) const { return cis_[num % den_]; }

  Character character(u64 index) const {
    if (index >= nchars_) throw std::out_of_range("character index");
    Character chi;
    chi.group = this;
    chi.e.resize(radix_.size());
    for (size_t i = 0; i < radix_.size(); ++i) {
      chi.e[i] = index % radix_[i];
      index /= radix_[i];
    }
    return chi;
  }

  u64 index_of(const Character& chi) const {
    u64 idx = 0;
    for (size_t i = radix_.size(); i-- > 0;) idx = idx * radix_[i] + chi.e[i];
    return idx;
  }

  u64 conjugate_index(u64 index) const {
    Character chi = character(index);
    for (size_t i = 0; i < chi.e.size(); ++i)
      if (chi.e[i]) chi.e[i] = radix_[i] - chi.e[i];
    return index_of(chi);
  }

  // Phase numerator of chi(n) over den, or UINT64_MAX when chi(n) = 0.
  u64 phase_of(const Character& chi, u64 n) const {
    u64 m = q();
    if (m == 1) return 0;
    if (std::gcd(n % m, m) != 1) return UINT64_MAX;
    u64 num = 0;
    for (size_t i = 0; i < odd_primes_.size(); ++i) {
      u64 p = odd_primes_[i];
      u64 d = tables_[i]->dlog[n % p];
      num = (num + chi.e[i] % radix_[i] * (den_ / radix_[i]) % den_ * d) % den_;
    }
    return num;
  }

  cplx eval(const Character& chi, u64 n) const {
    u64 num = phase_of(chi, n);
    return num == UINT64_MAX ? cplx{0.0, 0.0} : cis_[num];
  }

  // chi(-1): +1 even, -1 odd.  dlog_p(-1) = (p-1)/2, so the parity is
  // (-1)^{sum of exponents}.
  int parity(const Character& chi) const {
    u64 s = 0;
    for (u64 ei : chi.e) s += ei;
    return (s & 1) ? -1 : +1;
  }

  u64 conductor(const Character& chi) const {
    u64 c = 1;
    for (size_t i = 0; i < odd_primes_.size(); ++i)
      if (chi.e[i]) c *= odd_primes_[i];
    return c;
  }

  bool is_primitive(const Character& chi) const {
    return conductor(chi) == q();
  }

  std::vector<u64> primitive_indices() const {
    std::vector<u64> out;
    if (q() % 2 == 0 && q() > 1) return out;  // q = 2*odd has none
    for (u64 idx = 0; idx < nchars_; ++idx) {
      Character chi = character(idx);
      bool prim = true;
      for (u64 ei : chi.e)
        if (!ei) {
          prim = false;
          break;
        }
      if (prim) out.push_back(idx);
    }
    return out;
  }

  const std::vector<u64>& radix() const { return radix_; }

 private:
  Factored modulus_;
  std::vector<u64> odd_primes_;
  std::vector<const DlogTable*> tables_;
  std::vector<u64> radix_;
  u64 nchars_ = 1;
  u64 den_ = 1;
  std::vector<cplx> cis_;
};

inline CharacterGroup char_group(const Factored& q) {
  return CharacterGroup(q);
}
inline CharacterGroup char_group(u64 q) {
  return CharacterGroup(arith::factorize(q));
}

inline cplx eval(const Character& chi, u64 n) {
  return chi.group->eval(chi, n);
}
inline int parity(const Character& chi) { return chi.group->parity(chi); }
inline u64 conductor(const Character& chi) {
  return chi.group->conductor(chi);
}
inline bool is_primitive(const Character& chi) {
  return chi.group->is_primitive(chi);
}

// ---------------------------------------------------------------------------
// Gauss sums

// Literal O(q) definition sum.
inline cplx gauss_sum(const Character& chi) {
  const CharacterGroup& G = *chi.group;
  u64 q = G.q();
  if (q == 1) return {1.0, 0.0};
  cplx acc{0.0, 0.0};
  for (u64 x = 1; x < q; ++x) {
    if (std::gcd(x, q) != 1) continue;
    double th = 2.0 * std::numbers::pi * (double)x / (double)q;
    acc += G.eval(chi, x) * cplx{std::cos(th), std::sin(th)};
  }
  return acc;
}

// tau(chi) for every character mod prime p, indexed by local exponent.
// O(p^2) double loop; disk-cached since the census touches the same
// primes over and over.
inline const std::vector<cplx>& local_gauss_table(u64 p) {
  static std::map<u64, std::unique_ptr<std::vector<cplx>>> memo;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = memo.find(p);
  if (it != memo.end()) return *it->second;

  auto tab = std::make_unique<std::vector<cplx>>();
  std::string rel = "gauss/q" + std::to_string(p) + ".bin";
  std::vector<double> blob;
  if (p > 64 && cache::load(rel, cache::kKindGauss, p, blob) &&
      blob.size() == 2 * (p - 1)) {
    tab->resize(p - 1);
    for (u64 e = 0; e + 1 < p; ++e) (*tab)[e] = {blob[2 * e], blob[2 * e + 1]};
  } else {
    const DlogTable& T = dlog_table(p);
    std::vector<cplx> zeta(p - 1), ex(p);
    for (u64 j = 0; j + 1 < p; ++j) {
      double th = 2.0 * std::numbers::pi * (double)j / (double)(p - 1);
      zeta[j] = {std::cos(th), std::sin(th)};
    }
    for (u64 x = 0; x < p; ++x) {
      double th = 2.0 * std::numbers::pi * (double)x / (double)p;
      ex[x] = {std::cos(th), std::sin(th)};
    }
    tab->assign(p - 1, cplx{0.0, 0.0});
    for (u64 e = 0; e + 1 < p; ++e) {
      cplx acc{0.0, 0.0};
      for (u64 x = 1; x < p; ++x) acc += zeta[(e * T.dlog[x]) % (p - 1)] * ex[x];
      (*tab)[e] = acc;
    }
    if (p > 64) {
      blob.resize(2 * (p - 1));
      for (u64 e = 0; e + 1 < p; ++e) {
        blob[2 * e] = (*tab)[e].real();
        blob[2 * e + 1] = (*tab)[e].imag();
      }
      cache::store(rel, cache::kKindGauss, p, blob);
    }
  }
  const std::vector<cplx>& ref = *tab;
  memo.emplace(p, std::move(tab));
  return ref;
}

// tau(chi) assembled from the local tables:
//   tau(chi) = prod_p tau_p(chi_p) * chi_p(q/p mod p),
// the coprime-splitting identity applied prime by prime (it holds for
// imprimitive characters too).  The prime 2 contributes tau_2 = -1.
inline cplx gauss_sum_assembled(const Character& chi) {
  const CharacterGroup& G = *chi.group;
  u64 q = G.q();
  if (q == 1) return {1.0, 0.0};
  cplx acc{1.0, 0.0};
  if (q % 2 == 0) acc = {-1.0, 0.0};
  const auto& primes = G.odd_primes();
  for (size_t i = 0; i < primes.size(); ++i) {
    u64 p = primes[i];
    const DlogTable& T = dlog_table(p);
    acc *= local_gauss_table(p)[chi.e[i]];
    u64 cof = (q / p) % p;
    u64 d = T.dlog[cof];
    double th =
        2.0 * std::numbers::pi * (double)((chi.e[i] * d) % (p - 1)) / (double)(p - 1);
    acc *= cplx{std::cos(th), std::sin(th)};
  }
  return acc;
}

// All Gauss sums mod q, indexed by character index.
inline std::vector<cplx> gauss_table(const CharacterGroup& G) {
  std::vector<cplx> out(G.size());
  for (u64 idx = 0; idx < G.size(); ++idx)
    out[idx] = gauss_sum_assembled(G.character(idx));
  return out;
}

// ---------------------------------------------------------------------------
// primitive-character orthogonality

// Exact divisor-side value of sum_{chi primitive mod q} chi(n) for
// gcd(n, q) = 1:  sum_{d | q, n = 1 (d)} mu(q/d) phi(d).
inline i64 primitive_char_sum_divisor_side(const Factored& q, u64 n) {
  i64 total = 0;
  for (u64 d : q.divisors()) {
    if (n % d != 1 % d) continue;
    auto rest = q.value / d;
    total += arith::mobius(rest) * (i64)arith::euler_phi(d);
  }
  return total;
}

// Brute character-side sum, walking all characters with an odometer and
// an incrementally maintained exact phase.
inline cplx primitive_char_sum_character_side(const CharacterGroup& G, u64 n) {
  u64 q = G.q();
  if (q == 1) return {1.0, 0.0};
  if (q % 2 == 0) return {0.0, 0.0};  // no primitive characters
  u64 den = G.phase_denominator();
  const auto& primes = G.odd_primes();
  size_t w = primes.size();

  // per-prime phase step of one exponent unit
  std::vector<u64> step(w), wrap(w);
  for (size_t i = 0; i < w; ++i) {
    u64 p = primes[i];
    u64 d = dlog_table(p).dlog[n % p];
    step[i] = (den / (p - 1)) % den * d % den;
    wrap[i] = step[i] * (p - 1) % den;  // subtracted when a digit resets
  }

  std::vector<u64> digit(w, 0);
  u64 phase = 0;
  size_t zeros = w;  // digits currently equal to 0
  cplx acc{0.0, 0.0};
  for (u64 count = 0;; ++count) {
    if (zeros == 0) acc += G.root_of_unity(phase);
    // odometer increment
    size_t i = 0;
    for (; i < w; ++i) {
      if (digit[i] == 0) --zeros;
      ++digit[i];
      phase = (phase + step[i]) % den;
      if (digit[i] < primes[i] - 1) break;
      digit[i] = 0;
      ++zeros;
      phase = (phase + den - wrap[i]) % den;
    }
    if (i == w) break;
  }
  return acc;
}

// Evaluates the sum both ways, insists they agree, returns the integer.
inline i64 primitive_char_sum(const Factored& q, u64 n) {
  if (std::gcd(n % q.value, q.value) != 1 && q.value > 1)
    throw std::invalid_argument("primitive_char_sum requires gcd(n, q) = 1");
  CharacterGroup G(q);
  i64 divisor_side = primitive_char_sum_divisor_side(q, n);
  cplx character_side = primitive_char_sum_character_side(G, n);
  double err = std::abs(character_side - cplx{(double)divisor_side, 0.0});
  if (err > 1e-6 * (1.0 + std::abs((double)divisor_side)))
    throw std::runtime_error("primitive character sum: route mismatch");
  return divisor_side;
}

// Number of primitive characters mod squarefree q.
inline i64 primitive_count(const Factored& q) {
  return primitive_char_sum_divisor_side(q, 1);
}

}  // namespace charsum::dirichlet
