#pragma once

// Reference values computed independently with 30-digit arbitrary-precision
// arithmetic (mpmath) from the closed-form integral representations of each
// jump measure, then frozen here. Tests compare library output against these
// constants; none of them is produced by the library itself.

namespace oracle {

// Tempered power-law model, cp = cm = 1, alpha = 0.5, lam_pos = 5, lam_neg = 5
// ("cgmy" with C=1, G=5, M=5, Y=0.5).
inline constexpr double cgmy_tail_mass_01 = 2.6416518311445426;      // eps = 0.1
inline constexpr double cgmy_tail_mass_eighth = 1.877612862744848;   // eps = 1/8
inline constexpr double cgmy_tail_mass_256 = 49.392637638463339;     // eps = 1/256
inline constexpr double cgmy_tail_mass_1e4 = 384.34667414457581;     // eps = 1e-4
inline constexpr double cgmy_m2_001 = 1.2940384536897982e-3;         // p=2, eps=0.01
inline constexpr double cgmy_m2_01 = 0.031508141782369873;           // p=2, eps=0.1
inline constexpr double cgmy_m2_05 = 0.13129755943856039;            // p=2, eps=0.5
inline constexpr double cgmy_m2_1 = 0.15558974504457123;             // p=2, eps=1
inline constexpr double cgmy_m075_1 = 4.8467970316545381;            // p=0.75, eps=1
inline constexpr double cgmy_mtot_075 = 4.8491829514997129;          // ∫|x|^0.75 ν
inline constexpr double cgmy_mtot_2 = 0.15853309190424044;           // ∫ x^2 ν
inline constexpr double cgmy_cbeta_075 = 4.4041720908700708;         // 2√(∫|x|^0.75)
inline constexpr double cgmy_cbeta_15 = 1.2649110640673517;          // 2√(∫|x|^1.5)

// Same family, asymmetric tempering: cp = cm = 1, alpha = 0.5, M = 5, G = 2.
inline constexpr double cgmy_asym_drift_01 = -0.40908733773063713;   // eps = 0.1
inline constexpr double cgmy_asym_drift_1e12 = -0.46064867779429805; // eps = 1e-12

// Gaussian finite-activity model, lambda = 1, mu = 0, sigma = 1.
inline constexpr double merton_tail_mass_03 = 0.76417715562209473;   // eps = 0.3
inline constexpr double merton_m2_04 = 1.6227370977989687e-2;        // p=2, eps=0.4
inline constexpr double merton_m2_64 = 1.0144883785755272e-6;        // p=2, eps=1/64
inline constexpr double merton_mtot_05 = 0.82217895866245855;        // ∫|x|^0.5 ν
inline constexpr double merton_mtot_1 = 0.79788456080286536;         // ∫|x| ν = √(2/π)
inline constexpr double merton_cbeta_1 = 1.7864876834760047;         // 2√(∫|x| ν)

// Gaussian finite-activity model, lambda = 2, mu = 0.3, sigma = 0.8.
inline constexpr double merton2_drift_05 = 0.56748518460304937;      // eps = 0.5
inline constexpr double merton2_tail_mass_05 = 1.1198978564970667;   // eps = 0.5

// Two-sided power-tail model c+ = 1, c- = 0.5, alpha = 1.2, lam+ = 3, lam- = 4.
inline constexpr double stable_tail_mass_02 = 2.3993549431807876;    // eps = 0.2
inline constexpr double stable_m2_02 = 0.39260486154971766;          // p=2, eps=0.2
inline constexpr double stable_cbeta_15 = 3.5431371621423638;

// Atomic models.
inline constexpr double zeta_15 = 2.6123753486854883;                // Σ i^-1.5
inline constexpr double harmonic_cbeta_15 = 3.232568853828477;       // 2√ζ(1.5)
inline constexpr double logh_sum_p2_from2 = 0.93754825431584375;     // Σ_{i≥2} ln i/i²
inline constexpr double logh_sum_p2_from3 = 0.76426145917585746;
inline constexpr double logh_sum_p2_from4 = 0.64219342710162305;
inline constexpr double logh_sum_p2_from100 = 0.056282644552472649;

// Miscellaneous analytic constants used by the experiments.
inline constexpr double half_one_minus_inv_e = 0.31606027941427884;  // (1-e⁻¹)/2
inline constexpr double chi2_16_crit_999 = 39.252354790768476;       // χ²₁₆ @ 0.999

}  // namespace oracle
