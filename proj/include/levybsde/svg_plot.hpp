#pragma once
#include <string>
#include <vector>

#include "levybsde/rates.hpp"

namespace levybsde {

// Self-contained SVG (inline styling only) on log2-log2 axes: the measured
// errors with +-3*SE whiskers, the theory-bound curve as a reference line,
// and the fitted/theoretical slopes in the legend.
std::string svg_rate_plot(const RateReport& rep, const std::string& title);

// Lower/upper distance brackets across levels on log2-log2 axes.
std::string svg_bracket_plot(const std::vector<LowerBoundReport>& rows,
                             const std::string& title);

}  // namespace levybsde
