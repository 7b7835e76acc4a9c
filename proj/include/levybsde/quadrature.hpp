#pragma once
#include <functional>

namespace levybsde {

// Adaptive Gauss–Kronrod 7–15 on [a,b] to absolute tolerance `abstol`.
// The integrand must be finite on (a,b); endpoint behavior is handled by
// callers via panel splitting.
double gk_adaptive(const std::function<double(double)>& f, double a, double b,
                   double abstol, int max_depth = 52);

// ∫_a^b f over 0 < a < b for integrands singular at 0: geometric panels from
// a to b (ratio ~4) integrated adaptively, summed from the smallest panel up.
double integrate_log_panels(const std::function<double(double)>& f, double a,
                            double b, double abstol);

}  // namespace levybsde
