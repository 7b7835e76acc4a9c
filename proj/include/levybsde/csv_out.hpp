#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "levybsde/bsde_grid.hpp"
#include "levybsde/levy_measures.hpp"
#include "levybsde/rates.hpp"

namespace levybsde {

// "%.17g" rendering; round-trips IEEE doubles and never localizes.
std::string csv_num(double x);

// Comment preamble every report starts with: report kind, config hash
// (16 hex digits), master seed.  Lines are '#'-prefixed; data follows.
std::string csv_preamble(const std::string& report_kind, std::uint64_t cfg_hash,
                         std::uint64_t seed);

// Rate reports: (n, error, se, bound, theory_slope) rows; experiments with a
// driver-gap term append (gap_term, dominant) columns.  Fit results and the
// report note ride in the comment header.
std::string rate_report_csv(const RateReport& rep, const std::string& report_kind,
                            std::uint64_t cfg_hash, std::uint64_t seed);

// Lower-bound reports: (n, lower, upper, c_T, m2_half) plus the upper
// estimate's standard error and the ordering flag.
std::string lower_bound_csv(const std::vector<LowerBoundReport>& rows,
                            std::uint64_t cfg_hash, std::uint64_t seed);

// One radius of the measure-functional sweep; divergent moments print "inf".
struct AnalyzeRow {
  double eps = 0;
  double tail_mass = 0;
  Moment m1, m2, m_beta;
};
std::string analyze_csv(const std::vector<AnalyzeRow>& rows, double beta,
                        double cbeta, std::uint64_t cfg_hash,
                        std::uint64_t seed);

// Small-ball bracket table: (rule, n, value, lo, hi, pass).
std::string boundary_csv(const BoundaryReport& rep, std::uint64_t cfg_hash,
                         std::uint64_t seed);

// Random-walk coupling gap rows: (T, k_n, paths, estimate, se, floor).
struct AppendixRow {
  double T = 0;
  double k_n = 0;
  std::size_t paths = 0;
  double estimate = 0;
  double se = 0;
  double floor = 0;
};
std::string appendix_csv(const std::vector<AppendixRow>& rows,
                         std::uint64_t cfg_hash, std::uint64_t seed);

// Value-function table (t, x, u), time-major.
std::string solution_csv(const GridSolution& sol, std::uint64_t cfg_hash,
                         std::uint64_t seed);

}  // namespace levybsde
