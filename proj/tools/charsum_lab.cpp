// Command-line front end: exponential-sum evaluators, central twisted
// values, moduli-set construction, the census driver, and the verification
// suite, one subcommand each.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "charsum/verify.hpp"

using namespace charsum;
using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

namespace {

struct ProviderHandle {
  const autcoeffs::CoeffProvider* pi = nullptr;
  std::unique_ptr<autcoeffs::CoeffProvider> owned;
};

ProviderHandle resolve_provider(const std::string& name) {
  ProviderHandle h;
  if (name == "sym3-delta") {
    h.pi = &autcoeffs::sym3_delta();
  } else if (name == "rankin-delta-pair") {
    h.pi = &autcoeffs::rankin_delta_pair();
  } else {
    h.owned = autcoeffs::file_provider(name);
    h.pi = h.owned.get();
  }
  return h;
}

std::vector<u64> split_u64(const std::string& s) {
  std::vector<u64> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoull(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    if (comma > pos) out.push_back(s.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

const char* value_status(const cplx& v) {
  double a = std::abs(v);
  if (a > census::kNonzeroFloor) return "nonzero";
  if (a < census::kZeroCeiling) return "zero-ish";
  return "indeterminate";
}

// ---------------------------------------------------------------------------
// expsum

int run_expsum(const std::string& kind, int k, const std::string& modulus,
               i64 ell, u64 v1, u64 v2, bool check_factored,
               const std::string& pi_name) {
  auto mods = split_u64(modulus);
  nlohmann::json j;
  j["kind"] = kind;
  cplx value{0.0, 0.0};
  bool checked = false;
  cplx brute{0.0, 0.0};

  if (kind == "tk") {
    if (mods.empty() || mods.size() > 2)
      throw std::invalid_argument("tk wants --modulus q or --modulus r,s");
    u64 q = mods.size() == 1 ? mods[0] : mods[0] * mods[1];
    u64 l = ((ell % (i64)q) + (i64)q) % (i64)q;
    value = mods.size() == 1
                ? expsums::t_k_prime_factored(l, arith::factorize(q), k).value
                : expsums::t_k_factored(l, arith::factorize(mods[0]),
                                        arith::factorize(mods[1]), k)
                      .value;
    if (check_factored) {
      brute = expsums::t_k_brute(l, arith::factorize(q), k).value;
      checked = true;
    }
  } else if (kind == "kk") {
    if (mods.size() != 3)
      throw std::invalid_argument("kk wants --modulus r,s1,s2");
    expsums::KKParams P;
    P.r = arith::factorize(mods[0]);
    P.s1 = arith::factorize(mods[1]);
    P.s2 = arith::factorize(mods[2]);
    P.v1 = v1;
    P.v2 = v2;
    P.ell = ell;
    value = expsums::kk_factored(P, k);
    if (check_factored) {
      brute = expsums::kk_brute(P, k);
      checked = true;
    }
  } else if (kind == "hk") {
    if (mods.size() != 1)
      throw std::invalid_argument("hk wants --modulus p");
    value = expsums::hyper_kloosterman(v1, mods[0], k);
  } else if (kind == "epi") {
    if (mods.size() != 1)
      throw std::invalid_argument("epi wants --modulus q");
    auto h = resolve_provider(pi_name);
    auto F = arith::factorize(mods[0]);
    value = expsums::e_pi_transform(v1, F, *h.pi);
    if (check_factored) {
      u64 q = F.value;
      if (q > 1 && std::gcd(v1 % q, q) == 1) {
        dirichlet::CharacterGroup G(F);
        for (u64 idx : G.primitive_indices()) {
          auto chi = G.character(idx);
          auto bar = G.character(G.conjugate_index(idx));
          brute +=
              expsums::root_number_of(*h.pi, G, chi) * G.eval(bar, v1 % q);
        }
      } else {
        brute = value;  // degenerate inputs have no character-sum side
      }
      checked = true;
    }
  } else {
    throw std::invalid_argument("unknown --kind: " + kind);
  }

  j["value_re"] = value.real();
  j["value_im"] = value.imag();
  if (checked) {
    j["brute_value"] = {brute.real(), brute.imag()};
    j["discrepancy"] = std::abs(value - brute);
  } else {
    j["brute_value"] = nullptr;
    j["discrepancy"] = nullptr;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// lvalue

int run_lvalue(const std::string& pi_name, u64 q, i64 chi_index,
               bool all_primitive, const std::string& out) {
  if (out != "json" && out != "csv")
    throw std::invalid_argument("--out must be json or csv");
  if (!all_primitive && chi_index < 0)
    throw std::invalid_argument("pass --chi <index> or --all-primitive");
  auto h = resolve_provider(pi_name);
  auto G = dirichlet::char_group(q);

  u64 lim = (u64)(64.0 * (double)q * (double)q *
                  std::sqrt((double)h.pi->conductor())) +
            2;
  std::vector<cplx> table;
  const std::vector<cplx>* table_ptr = nullptr;
  try {
    table = autcoeffs::coeff_table(*h.pi, lim);
    table_ptr = &table;
  } catch (const autcoeffs::coefficient_gap&) {
    // the sweep may still fit inside the provider's own range
  }

  std::vector<lfun::TwistedLValue> rows;
  if (all_primitive) {
    rows = lfun::l_central_all(*h.pi, G, {}, table_ptr);
  } else {
    rows.push_back(lfun::l_central(*h.pi, G, (u64)chi_index, {}, table_ptr));
  }

  if (out == "csv") {
    auto f = census::detail::fmt12;
    std::cout << "q,chi_index,parity,re,im,abs,eps_re,eps_im,tail_est,"
                 "status\n";
    for (auto& r : rows)
      std::cout << r.q << ',' << r.chi_index << ',' << r.parity << ','
                << f(r.value.real()) << ',' << f(r.value.imag()) << ','
                << f(std::abs(r.value)) << ',' << f(r.eps.real()) << ','
                << f(r.eps.imag()) << ',' << f(r.tail_est) << ','
                << value_status(r.value) << "\n";
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& r : rows) {
      nlohmann::json row;
      row["q"] = r.q;
      row["chi_index"] = r.chi_index;
      row["parity"] = r.parity;
      row["re"] = r.value.real();
      row["im"] = r.value.imag();
      row["abs"] = std::abs(r.value);
      row["eps"] = {r.eps.real(), r.eps.imag()};
      row["tail_est"] = r.tail_est;
      row["terms_forward"] = r.terms_forward;
      row["terms_dual"] = r.terms_dual;
      row["status"] = value_status(r.value);
      arr.push_back(row);
    }
    std::cout << arr.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// moduli

int run_moduli(const std::string& profile_path) {
  auto P = moduli::load_profile(profile_path);
  auto S = moduli::build_moduli(P);
  nlohmann::json j;
  j["mode"] = P.paper_mode ? "paper" : "desk";
  j["Q"] = P.Q;
  j["member_count"] = S.members.size();
  j["members"] = nlohmann::json::array();
  for (auto& m : S.members) {
    nlohmann::json e;
    e["q"] = m.q.value;
    e["witnesses"] = {{"p1", m.p1}, {"p2", m.p2}, {"m", m.m}};
    j["members"].push_back(e);
  }
  j["empty_reason"] = S.empty_reason;
  j["recorded_overrides"] = P.recorded_overrides;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// census

int run_census_cmd(const std::string& pi_name, const std::string& profile_path,
                   const std::string& parity_name, u64 coprime_to,
                   const std::string& out, const std::string& run_id,
                   const std::string& runs_root, bool expect_nonvanishing) {
  auto h = resolve_provider(pi_name);
  auto P = moduli::load_profile(profile_path);
  census::RunOptions opt;
  opt.run_id = run_id;
  opt.runs_root = runs_root;
  auto rep = census::run_census(*h.pi, P, census::parse_parity(parity_name),
                                coprime_to, opt);

  if (out.empty())
    std::cout << census::census_csv(rep);
  else
    census::write_census_csv(rep, out);

  auto s = census::nonvanishing_summary(rep);
  std::ostream& log = out.empty() ? std::cerr : std::cout;
  log << "members: " << rep.members.size() << ", rows: " << rep.rows.size()
      << ", nonzero: " << s.nonzero << " (even " << s.nonzero_even << ", odd "
      << s.nonzero_odd << "), indeterminate: " << s.indeterminate
      << ", zero-ish: " << s.zeroish << ", skipped: " << s.skipped << "\n";
  if (!rep.note.empty()) log << "note: " << rep.note << "\n";
  if (s.nonzero > 0) {
    log << "min |L| among nonzero rows: " << s.min_abs_nonzero
        << ", moduli with a nonzero row:";
    for (u64 q : s.nonzero_q) log << " " << q;
    log << "\n";
  }
  if (expect_nonvanishing) return s.nonzero >= 1 ? 0 : 1;
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const std::string& suite, const std::string& only,
               const std::string& ledger_path) {
  verify::GridScale scale;
  if (suite == "quick")
    scale = verify::GridScale::kQuick;
  else if (suite == "full")
    scale = verify::GridScale::kFull;
  else
    throw std::invalid_argument("--suite must be quick or full");

  std::vector<std::string> selection =
      only.empty() ? verify::all_check_ids() : split_names(only);
  auto ledger = verify::run_suite(selection, scale);

  for (auto& r : ledger.results)
    std::printf("%-36s %s  worst=%.3e  tol=%.1e  [%s]\n", r.id.c_str(),
                r.pass ? "ok  " : "FAIL", r.worst, r.tolerance,
                r.grid.c_str());
  std::printf("suite %s: %s (%zu checks)\n", verify::scale_name(scale),
              ledger.pass ? "pass" : "fail", ledger.results.size());

  if (!ledger_path.empty()) {
    std::ofstream f(ledger_path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + ledger_path);
    f << verify::ledger_json(ledger).dump(2) << "\n";
  }
  return ledger.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential sums, twisted central values, and the census "
               "over factored moduli sets"};
  app.require_subcommand(1);

  // expsum
  std::string es_kind, es_modulus, es_pi = "sym3-delta";
  int es_k = 4;
  i64 es_ell = 0;
  u64 es_v1 = 1, es_v2 = 1;
  bool es_check = false;
  auto* expsum = app.add_subcommand("expsum", "evaluate one exponential sum");
  expsum->add_option("--kind", es_kind, "tk, kk, hk, or epi")->required();
  expsum->add_option("--k", es_k, "hyper-Kloosterman depth");
  expsum->add_option("--modulus", es_modulus, "comma-separated moduli")
      ->required();
  expsum->add_option("--ell", es_ell, "shift argument");
  expsum->add_option("--v1", es_v1, "first point");
  expsum->add_option("--v2", es_v2, "second point");
  expsum->add_flag("--check-factored", es_check,
                   "also run the brute route and report the discrepancy");
  expsum->add_option("--pi", es_pi, "provider for epi (name or file)");

  // lvalue
  std::string lv_pi = "sym3-delta", lv_out = "json";
  u64 lv_q = 0;
  i64 lv_chi = -1;
  bool lv_all = false;
  auto* lvalue = app.add_subcommand("lvalue", "central twisted values");
  lvalue->add_option("--pi", lv_pi, "sym3-delta, rankin-delta-pair, or file");
  lvalue->add_option("--q", lv_q, "twisting modulus")->required();
  lvalue->add_option("--chi", lv_chi, "character index");
  lvalue->add_flag("--all-primitive", lv_all, "every primitive character");
  lvalue->add_option("--out", lv_out, "json or csv");

  // moduli
  std::string mo_profile;
  auto* mod = app.add_subcommand("moduli", "construct a factored moduli set");
  mod->add_option("--profile", mo_profile, "profile file")->required();

  // census
  std::string ce_pi = "sym3-delta", ce_profile, ce_parity = "both";
  std::string ce_out, ce_run_id, ce_root = "runs";
  u64 ce_coprime = 1;
  bool ce_expect = false;
  auto* cen = app.add_subcommand("census", "central-value census over a "
                                           "moduli set");
  cen->add_option("--pi", ce_pi, "provider (name or file)");
  cen->add_option("--profile", ce_profile, "profile file")->required();
  cen->add_option("--parity", ce_parity, "even, odd, or both");
  cen->add_option("--coprime-to", ce_coprime, "extra coprimality target");
  cen->add_option("--out", ce_out, "CSV output path (default: stdout)");
  cen->add_option("--run-id", ce_run_id, "resume id; shards go under the "
                                         "runs root");
  cen->add_option("--runs-root", ce_root, "directory for resume shards");
  cen->add_flag("--expect-nonvanishing", ce_expect,
                "exit 0 only if at least one row is nonzero");

  // verify
  std::string ve_suite = "quick", ve_only, ve_ledger;
  auto* ver = app.add_subcommand("verify", "run the invariant check suite");
  ver->add_option("--suite", ve_suite, "quick or full");
  ver->add_option("--only", ve_only, "comma-separated check ids");
  ver->add_option("--ledger", ve_ledger, "write the JSON ledger here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (expsum->parsed())
      return run_expsum(es_kind, es_k, es_modulus, es_ell, es_v1, es_v2,
                        es_check, es_pi);
    if (lvalue->parsed())
      return run_lvalue(lv_pi, lv_q, lv_chi, lv_all, lv_out);
    if (mod->parsed()) return run_moduli(mo_profile);
    if (cen->parsed())
      return run_census_cmd(ce_pi, ce_profile, ce_parity, ce_coprime, ce_out,
                            ce_run_id, ce_root, ce_expect);
    if (ver->parsed()) return run_verify(ve_suite, ve_only, ve_ledger);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
