#pragma once
// Central-value census over a factored moduli set: every primitive character
// mod every member is evaluated once, rows are sharded by modulus with
// resumable on-disk runs, and the banded family pipeline can be replayed
// against the direct row sums on small instances.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "charsum/dirichlet.hpp"
#include "charsum/lfun.hpp"
#include "charsum/moduli.hpp"

namespace charsum::census {

using arith::u64;
using autcoeffs::CoeffProvider;
using cplx = std::complex<double>;

// A row with |L| above the floor counts as nonzero; below the ceiling it is
// treated as zero.  The band between the two is indeterminate: such rows are
// reported for follow-up at higher precision but never counted as nonzero.
constexpr double kNonzeroFloor = 1e-3;
constexpr double kZeroCeiling = 1e-6;

enum class Parity { kBoth = 0, kEven = 1, kOdd = -1 };

inline const char* parity_name(Parity p) {
  switch (p) {
    case Parity::kEven: return "even";
    case Parity::kOdd: return "odd";
    default: return "both";
  }
}

inline Parity parse_parity(const std::string& s) {
  if (s == "even") return Parity::kEven;
  if (s == "odd") return Parity::kOdd;
  if (s == "both") return Parity::kBoth;
  throw std::invalid_argument("parity must be even, odd, or both");
}

struct CensusRow {
  lfun::TwistedLValue lv;
  bool skipped = false;      // coefficient data ran out for this modulus
  std::string skip_reason;
};

inline const char* row_status(const CensusRow& row) {
  if (row.skipped) return "skipped";
  double a = std::abs(row.lv.value);
  if (a > kNonzeroFloor) return "nonzero";
  if (a < kZeroCeiling) return "zero-ish";
  return "indeterminate";
}

struct CensusReport {
  moduli::ModuliProfile profile;  // with the extra coprimality folded in
  Parity parity = Parity::kBoth;
  std::vector<u64> members;       // every modulus in the set, ascending
  std::vector<CensusRow> rows;    // ascending (q, chi_index)

  // aggregates fixed at assembly time; skipped rows contribute to no sum
  cplx sum_plain{0.0, 0.0};       // sum of central values
  cplx sum_signed{0.0, 0.0};      // values weighted by chi(-1)
  u64 count_nonzero = 0;
  u64 count_indeterminate = 0;
  u64 count_zeroish = 0;
  u64 count_skipped = 0;
  double min_abs_nonzero = 0.0;   // over nonzero rows; 0 when there are none

  std::string note;               // set when the row set came out empty
};

// ---------------------------------------------------------------------------
// Resumable shards.  One file per modulus under <runs_root>/<run_id>/, keyed
// by a hash of everything that feeds the rows; a rerun with matching inputs
// loads the file instead of re-sweeping.

namespace detail {

inline u64 fnv1a(const std::string& s) {
  u64 h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string shard_hash(const CoeffProvider& pi, u64 q,
                              const lfun::AFEConfig& cfg) {
  char buf[512];
  auto mu = pi.mu();
  std::snprintf(buf, sizeof buf,
                "v1|%s|%llu|%.17g%+.17gi|%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%.17g|%llu|%.17g|%llu|%.17g",
                pi.name().c_str(), (unsigned long long)pi.conductor(),
                pi.c_pi().real(), pi.c_pi().imag(), mu[0].real(),
                mu[0].imag(), mu[1].real(), mu[1].imag(), mu[2].real(),
                mu[2].imag(), mu[3].real(), mu[3].imag(),
                (unsigned long long)q, cfg.split,
                (unsigned long long)cfg.term_cap, cfg.tail_tol);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                (unsigned long long)fnv1a(buf));
  return hex;
}

inline nlohmann::json row_to_json(const CensusRow& row) {
  nlohmann::json j;
  j["chi_index"] = row.lv.chi_index;
  j["parity"] = row.lv.parity;
  j["value"] = {row.lv.value.real(), row.lv.value.imag()};
  j["eps"] = {row.lv.eps.real(), row.lv.eps.imag()};
  j["forward"] = {row.lv.forward.real(), row.lv.forward.imag()};
  j["dual"] = {row.lv.dual.real(), row.lv.dual.imag()};
  j["tail_est"] = row.lv.tail_est;
  j["terms_forward"] = row.lv.terms_forward;
  j["terms_dual"] = row.lv.terms_dual;
  j["skipped"] = row.skipped;
  j["skip_reason"] = row.skip_reason;
  return j;
}

inline CensusRow row_from_json(u64 q, const nlohmann::json& j) {
  CensusRow row;
  row.lv.q = q;
  row.lv.chi_index = j.at("chi_index").get<u64>();
  row.lv.parity = j.at("parity").get<int>();
  auto pair = [&](const char* key) {
    auto a = j.at(key);
    return cplx{a.at(0).get<double>(), a.at(1).get<double>()};
  };
  row.lv.value = pair("value");
  row.lv.eps = pair("eps");
  row.lv.forward = pair("forward");
  row.lv.dual = pair("dual");
  row.lv.tail_est = j.at("tail_est").get<double>();
  row.lv.terms_forward = j.at("terms_forward").get<u64>();
  row.lv.terms_dual = j.at("terms_dual").get<u64>();
  row.skipped = j.at("skipped").get<bool>();
  row.skip_reason = j.at("skip_reason").get<std::string>();
  return row;
}

// Rows for every primitive character mod q, ascending by index.  A
// coefficient gap marks the whole shard skipped instead of aborting the run:
// the character roster needs no coefficient data, so the rows still appear.
inline std::vector<CensusRow> compute_shard(const CoeffProvider& pi,
                                            const arith::Factored& qf,
                                            const lfun::AFEConfig& cfg,
                                            const std::vector<cplx>* table) {
  dirichlet::CharacterGroup G(qf);
  std::vector<CensusRow> rows;
  try {
    for (auto& lv : lfun::l_central_all(pi, G, cfg, table))
      rows.push_back(CensusRow{lv, false, ""});
  } catch (const autcoeffs::coefficient_gap& gap) {
    rows.clear();
    for (u64 idx : G.primitive_indices()) {
      CensusRow row;
      row.lv.q = qf.value;
      row.lv.chi_index = idx;
      row.lv.parity = G.parity(G.character(idx));
      row.skipped = true;
      row.skip_reason = gap.what();
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<CensusRow> shard_rows(const CoeffProvider& pi,
                                         const arith::Factored& qf,
                                         const lfun::AFEConfig& cfg,
                                         const std::vector<cplx>* table,
                                         const std::string& shard_path) {
  std::string want = shard_hash(pi, qf.value, cfg);
  if (!shard_path.empty() && std::filesystem::exists(shard_path)) {
    try {
      std::ifstream in(shard_path);
      nlohmann::json j = nlohmann::json::parse(in);
      if (j.at("format").get<int>() == 1 &&
          j.at("input_hash").get<std::string>() == want &&
          j.at("q").get<u64>() == qf.value) {
        std::vector<CensusRow> rows;
        for (auto& rj : j.at("rows")) rows.push_back(row_from_json(qf.value, rj));
        return rows;
      }
    } catch (const nlohmann::json::exception&) {
      // unreadable or stale shard: fall through and recompute it
    }
  }
  auto rows = compute_shard(pi, qf, cfg, table);
  if (!shard_path.empty()) {
    nlohmann::json j;
    j["format"] = 1;
    j["input_hash"] = want;
    j["q"] = qf.value;
    j["rows"] = nlohmann::json::array();
    for (auto& row : rows) j["rows"].push_back(row_to_json(row));
    std::ofstream out(shard_path, std::ios::trunc);
    out << j.dump(1) << "\n";
  }
  return rows;
}

}  // namespace detail

struct RunOptions {
  lfun::AFEConfig afe;
  std::string run_id;              // empty runs without resume files
  std::string runs_root = "runs";
};

inline CensusReport run_census(const CoeffProvider& pi,
                               const moduli::ModuliProfile& profile,
                               Parity parity = Parity::kBoth,
                               u64 coprime_to = 1,
                               const RunOptions& opt = {}) {
  if (coprime_to < 1)
    throw std::invalid_argument("census: coprimality target must be >= 1");
  moduli::ModuliProfile eff = profile;
  eff.f = std::lcm(eff.f, coprime_to);
  moduli::validate_profile(eff);

  auto set = moduli::build_moduli(eff);
  if (set.members.empty())
    throw std::runtime_error("census: empty moduli set: " + set.empty_reason);

  CensusReport rep;
  rep.profile = eff;
  rep.parity = parity;
  for (auto& mem : set.members) rep.members.push_back(mem.q.value);

  // One dense coefficient table covers every sweep: the largest modulus sets
  // the deepest scale, and terms past 64 * scale are never touched.
  double side = std::max(opt.afe.split, 1.0 / opt.afe.split);
  double deepest = 64.0 * side * (double)rep.members.back() *
                   (double)rep.members.back() *
                   std::sqrt((double)pi.conductor());
  u64 limit = (u64)std::min((double)opt.afe.term_cap, deepest) + 2;
  std::vector<cplx> table;
  const std::vector<cplx>* table_ptr = nullptr;
  try {
    table = autcoeffs::coeff_table(pi, limit);
    table_ptr = &table;
  } catch (const autcoeffs::coefficient_gap&) {
    // providers with partial data still run; each shard reports its own gap
  }

  std::string run_dir;
  if (!opt.run_id.empty()) {
    std::filesystem::path dir =
        std::filesystem::path(opt.runs_root) / opt.run_id;
    std::filesystem::create_directories(dir);
    run_dir = dir.string();
  }

  u64 roster_total = 0;
  for (auto& mem : set.members) {
    std::string shard_path;
    if (!run_dir.empty())
      shard_path =
          run_dir + "/q" + std::to_string(mem.q.value) + ".json";
    auto rows = detail::shard_rows(pi, mem.q, opt.afe, table_ptr, shard_path);
    roster_total += rows.size();
    for (auto& row : rows) {
      if (parity == Parity::kEven && row.lv.parity != 1) continue;
      if (parity == Parity::kOdd && row.lv.parity != -1) continue;
      rep.rows.push_back(row);
    }
  }

  double min_abs = std::numeric_limits<double>::infinity();
  for (auto& row : rep.rows) {
    if (row.skipped) {
      ++rep.count_skipped;
      continue;
    }
    rep.sum_plain += row.lv.value;
    rep.sum_signed += (double)row.lv.parity * row.lv.value;
    double a = std::abs(row.lv.value);
    if (a > kNonzeroFloor) {
      ++rep.count_nonzero;
      min_abs = std::min(min_abs, a);
    } else if (a < kZeroCeiling) {
      ++rep.count_zeroish;
    } else {
      ++rep.count_indeterminate;
    }
  }
  if (rep.count_nonzero > 0) rep.min_abs_nonzero = min_abs;

  if (rep.rows.empty()) {
    rep.note = roster_total == 0
                   ? "no member of the moduli set carries a primitive "
                     "character"
                   : "the parity filter removed every row";
  } else if (rep.count_skipped == rep.rows.size()) {
    rep.note = "every row was skipped: coefficient data ran out";
  }
  return rep;
}

// Recomputed row sums; the stored aggregates must match these to 1e-9.
inline cplx mean_value(const CensusReport& rep) {
  cplx s{0.0, 0.0};
  for (auto& row : rep.rows)
    if (!row.skipped) s += row.lv.value;
  return s;
}

inline cplx signed_mean_value(const CensusReport& rep) {
  cplx s{0.0, 0.0};
  for (auto& row : rep.rows)
    if (!row.skipped) s += (double)row.lv.parity * row.lv.value;
  return s;
}

struct NonvanishingSummary {
  u64 nonzero = 0;
  u64 indeterminate = 0;
  u64 zeroish = 0;
  u64 skipped = 0;
  u64 nonzero_even = 0;
  u64 nonzero_odd = 0;
  double min_abs_nonzero = 0.0;
  std::vector<u64> nonzero_q;  // ascending, one entry per contributing modulus
};

inline NonvanishingSummary nonvanishing_summary(const CensusReport& rep) {
  NonvanishingSummary s;
  double min_abs = std::numeric_limits<double>::infinity();
  for (auto& row : rep.rows) {
    std::string st = row_status(row);
    if (st == "skipped") {
      ++s.skipped;
    } else if (st == "nonzero") {
      ++s.nonzero;
      (row.lv.parity == 1 ? s.nonzero_even : s.nonzero_odd) += 1;
      min_abs = std::min(min_abs, std::abs(row.lv.value));
      s.nonzero_q.push_back(row.lv.q);
    } else if (st == "indeterminate") {
      ++s.indeterminate;
    } else {
      ++s.zeroish;
    }
  }
  if (s.nonzero > 0) s.min_abs_nonzero = min_abs;
  std::sort(s.nonzero_q.begin(), s.nonzero_q.end());
  s.nonzero_q.erase(std::unique(s.nonzero_q.begin(), s.nonzero_q.end()),
                    s.nonzero_q.end());
  return s;
}

// ---------------------------------------------------------------------------
// CSV emission.  Fixed %.12e formatting keeps reruns byte-identical.

namespace detail {

inline std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

}  // namespace detail

inline std::string census_csv(const CensusReport& rep) {
  std::ostringstream out;
  out << "q,chi_index,parity,re,im,abs,eps_re,eps_im,tail_est,status,"
         "Q,p1,p2,z,max_omega,f,N_pi,parity_selector\n";
  std::string echo;
  {
    std::ostringstream e;
    e << detail::fmt12(rep.profile.Q) << ','
      << detail::fmt12(rep.profile.p1) << ','
      << detail::fmt12(rep.profile.p2) << ','
      << detail::fmt12(rep.profile.z) << ',' << rep.profile.max_omega << ','
      << rep.profile.f << ',' << rep.profile.n_pi << ','
      << parity_name(rep.parity);
    echo = e.str();
  }
  for (auto& row : rep.rows) {
    out << row.lv.q << ',' << row.lv.chi_index << ',' << row.lv.parity << ','
        << detail::fmt12(row.lv.value.real()) << ','
        << detail::fmt12(row.lv.value.imag()) << ','
        << detail::fmt12(std::abs(row.lv.value)) << ','
        << detail::fmt12(row.lv.eps.real()) << ','
        << detail::fmt12(row.lv.eps.imag()) << ','
        << detail::fmt12(row.lv.tail_est) << ',' << row_status(row) << ','
        << echo << "\n";
  }
  return out.str();
}

inline void write_census_csv(const CensusReport& rep,
                             const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("census: cannot open " + path);
  out << census_csv(rep);
}

// ---------------------------------------------------------------------------
// Pipeline shape check.  On a small instance, the parity-projected family sum
// of central values is rebuilt from band-limited forward and dual pieces
// (closed-form character averages) and compared against the direct rows.

struct PipelineBand {
  double band = 0.0;
  cplx forward{0.0, 0.0};
  cplx dual{0.0, 0.0};
};

struct PipelineSide {
  int sign = 1;                     // +1 projects even characters, -1 odd
  cplx direct{0.0, 0.0};            // from the census rows
  cplx banded{0.0, 0.0};            // from the band pieces
  cplx main_small_bands{0.0, 0.0};  // diagonal mass in bands below every q
  double rel_err = 0.0;
  bool pass = false;
  bool ablation_monotone = false;   // dropping top dual bands only hurts
  std::vector<PipelineBand> bands;
  std::vector<double> truncation_residuals;
};

struct PipelineReport {
  std::vector<u64> members;
  PipelineSide plus, minus;
  bool pass = false;
};

inline PipelineReport pipeline_shape_check(const CoeffProvider& pi,
                                           const moduli::ModuliProfile& profile,
                                           const lfun::AFEConfig& cfg = {},
                                           double tol = 1e-4) {
  if (profile.Q > 200.0)
    throw std::invalid_argument(
        "pipeline shape check is meant for small instances (Q <= 200)");
  RunOptions opt;
  opt.afe = cfg;
  auto rep = run_census(pi, profile, Parity::kBoth, 1, opt);
  for (auto& row : rep.rows)
    if (row.skipped)
      throw std::runtime_error(
          "pipeline shape check needs complete coefficient data: " +
          row.skip_reason);

  PipelineReport out;
  out.members = rep.members;

  double root_n = std::sqrt((double)pi.conductor());
  double side = std::max(cfg.split, 1.0 / cfg.split);
  u64 qmax = rep.members.back();
  double deepest = 64.0 * side * (double)qmax * (double)qmax * root_n;
  u64 limit = (u64)std::min((double)cfg.term_cap, deepest) + 2;
  auto table = autcoeffs::coeff_table(pi, limit);

  const auto& W1 = lfun::forward_weight(pi);
  const auto& W2 = lfun::dual_weight(pi);
  auto V = lfun::partition_window();

  for (int sign : {+1, -1}) {
    PipelineSide ps;
    ps.sign = sign;
    for (auto& row : rep.rows)
      ps.direct += (sign > 0 ? 1.0 : (double)row.lv.parity) * row.lv.value;

    for (double band = 0.5; band * V.lo < deepest; band *= 2.0) {
      PipelineBand pb;
      pb.band = band;
      for (u64 q : rep.members) {
        double scale_f = cfg.split * (double)q * (double)q * root_n;
        double scale_d = (double)q * (double)q * root_n / cfg.split;
        auto fp = lfun::forward_piece(pi, {q}, sign, band, V, W1, scale_f,
                                      false, &table);
        pb.forward += fp.value;
        pb.dual += lfun::dual_piece(pi, {q}, sign, band, V, W2, scale_d,
                                    false, &table)
                       .value;
        if (2.0 * band < (double)q - 1.0) ps.main_small_bands += fp.main_term;
      }
      ps.banded += pb.forward + pb.dual;
      ps.bands.push_back(pb);
    }

    ps.rel_err = std::abs(ps.banded - ps.direct) / (1.0 + std::abs(ps.direct));
    ps.pass = ps.rel_err <= tol;

    cplx truncated = ps.banded;
    ps.truncation_residuals.push_back(std::abs(truncated - ps.direct));
    for (size_t k = 0; k < ps.bands.size(); ++k) {
      truncated -= ps.bands[ps.bands.size() - 1 - k].dual;
      ps.truncation_residuals.push_back(std::abs(truncated - ps.direct));
    }
    // The monotonicity flag reads the early-truncation half of the ladder:
    // the first drops sit below the reconstruction noise floor, and deep
    // ablation can cancel between complex bands.  The full residual ladder
    // stays in the report either way.
    size_t checked = std::max<size_t>(4, ps.bands.size() / 2);
    checked = std::min(checked, ps.truncation_residuals.size() - 1);
    double noise = 1e-12 * (1.0 + std::abs(ps.direct));
    ps.ablation_monotone = ps.truncation_residuals[checked] >
                           ps.truncation_residuals.front();
    for (size_t k = 0; k < checked; ++k)
      if (ps.truncation_residuals[k + 1] <
          ps.truncation_residuals[k] - noise)
        ps.ablation_monotone = false;

    (sign > 0 ? out.plus : out.minus) = std::move(ps);
  }

  out.pass = out.plus.pass && out.minus.pass &&
             out.minus.main_small_bands == cplx{0.0, 0.0};
  return out;
}

}  // namespace charsum::census
