#include "levybsde/csv_out.hpp"

#include <cstdio>

#include "levybsde/config.hpp"

namespace levybsde {

namespace {

std::string moment_str(const Moment& m) {
  return m.infinite ? std::string("inf") : csv_num(m.value);
}

void append_fit_comments(std::string& out, const RateReport& rep) {
  out += "# paths=" + std::to_string(rep.paths) + "\n";
  out += "# beta=" + csv_num(rep.beta) + "\n";
  out += "# theory_slope=" + csv_num(rep.theory_slope) + "\n";
  out += "# reference_bias_bound=" + csv_num(rep.reference_bias_bound) + "\n";
  out += "# fit_slope=" + csv_num(rep.fit.slope) + "\n";
  out += "# fit_intercept=" + csv_num(rep.fit.intercept) + "\n";
  out += "# fit_ci_lo=" + csv_num(rep.fit.ci_lo) + "\n";
  out += "# fit_ci_hi=" + csv_num(rep.fit.ci_hi) + "\n";
  out += "# bound_fit_slope=" + csv_num(rep.bound_fit.slope) + "\n";
  if (!rep.note.empty()) out += "# note=" + rep.note + "\n";
}

}  // namespace

std::string csv_num(double x) {
  if (x == 0.0) return "0";  // normalize the sign of zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

std::string csv_preamble(const std::string& report_kind, std::uint64_t cfg_hash,
                         std::uint64_t seed) {
  std::string out;
  out += "# levy-bsde report=" + report_kind + "\n";
  out += "# config_hash=" + hash_hex(cfg_hash) + "\n";
  out += "# seed=" + std::to_string(seed) + "\n";
  return out;
}

std::string rate_report_csv(const RateReport& rep, const std::string& report_kind,
                            std::uint64_t cfg_hash, std::uint64_t seed) {
  std::string out = csv_preamble(report_kind, cfg_hash, seed);
  append_fit_comments(out, rep);
  bool with_gap = false;
  for (const auto& lv : rep.levels)
    if (!lv.dominant.empty()) with_gap = true;
  out += with_gap ? "n,error,se,bound,theory_slope,gap_term,dominant\n"
                  : "n,error,se,bound,theory_slope\n";
  for (const auto& lv : rep.levels) {
    out += csv_num(lv.n) + "," + csv_num(lv.error) + "," + csv_num(lv.se) +
           "," + csv_num(lv.bound) + "," + csv_num(rep.theory_slope);
    if (with_gap) out += "," + csv_num(lv.gap_term) + "," + lv.dominant;
    out += "\n";
  }
  return out;
}

std::string lower_bound_csv(const std::vector<LowerBoundReport>& rows,
                            std::uint64_t cfg_hash, std::uint64_t seed) {
  std::string out = csv_preamble("wasserstein", cfg_hash, seed);
  out += "n,lower,upper,c_T,m2_half,upper_se,ordered\n";
  for (const auto& r : rows) {
    out += csv_num(r.n) + "," + csv_num(r.lower) + "," +
           csv_num(r.coupled_upper) + "," + csv_num(r.c_T) + "," +
           csv_num(r.m2_half) + "," + csv_num(r.upper_se) + "," +
           (r.ordered ? "1" : "0") + "\n";
  }
  return out;
}

std::string analyze_csv(const std::vector<AnalyzeRow>& rows, double beta,
                        double cbeta, std::uint64_t cfg_hash,
                        std::uint64_t seed) {
  std::string out = csv_preamble("analyze", cfg_hash, seed);
  out += "# beta=" + csv_num(beta) + "\n";
  out += "eps,tail_mass,m1,m2,m_beta,c_beta\n";
  for (const auto& r : rows) {
    out += csv_num(r.eps) + "," + csv_num(r.tail_mass) + "," +
           moment_str(r.m1) + "," + moment_str(r.m2) + "," +
           moment_str(r.m_beta) + "," + csv_num(cbeta) + "\n";
  }
  return out;
}

std::string boundary_csv(const BoundaryReport& rep, std::uint64_t cfg_hash,
                         std::uint64_t seed) {
  std::string out = csv_preamble("boundary", cfg_hash, seed);
  out += "# failures=" + std::to_string(rep.failures) + "\n";
  out += "# all_pass=" + std::string(rep.all_pass ? "1" : "0") + "\n";
  out += "rule,n,value,lo,hi,pass\n";
  for (const auto& r : rep.rows) {
    out += std::string(r.rule == AtomicRule::HARMONIC ? "harmonic"
                                                      : "logharmonic") +
           "," + csv_num(r.n) + "," + csv_num(r.value) + "," + csv_num(r.lo) +
           "," + csv_num(r.hi) + "," + (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string appendix_csv(const std::vector<AppendixRow>& rows,
                         std::uint64_t cfg_hash, std::uint64_t seed) {
  std::string out = csv_preamble("appendix", cfg_hash, seed);
  out += "T,k_n,paths,estimate,se,floor\n";
  for (const auto& r : rows) {
    out += csv_num(r.T) + "," + csv_num(r.k_n) + "," +
           std::to_string(r.paths) + "," + csv_num(r.estimate) + "," +
           csv_num(r.se) + "," + csv_num(r.floor) + "\n";
  }
  return out;
}

std::string solution_csv(const GridSolution& sol, std::uint64_t cfg_hash,
                         std::uint64_t seed) {
  std::string out = csv_preamble("solution", cfg_hash, seed);
  out += "# lambda=" + csv_num(sol.lambda) + "\n";
  out += "# drift=" + csv_num(sol.drift) + "\n";
  out += "# q=" + csv_num(sol.q) + "\n";
  if (!sol.warning.empty()) out += "# warning=" + sol.warning + "\n";
  out += "t,x,u\n";
  out.reserve(out.size() + 32 * sol.tgrid.size() * sol.xgrid.size());
  for (std::size_t i = 0; i < sol.tgrid.size(); ++i)
    for (std::size_t j = 0; j < sol.xgrid.size(); ++j)
      out += csv_num(sol.tgrid[i]) + "," + csv_num(sol.xgrid[j]) + "," +
             csv_num(sol.u[i][j]) + "\n";
  return out;
}

}  // namespace levybsde
