#pragma once

// Frozen tolerance constants for the grid checks. Each grid-resolution
// dependent check uses tau(N) = C / N with the C fixed here; pointwise
// exact-jet checks use the absolute tolerances.

namespace folia::tol {

// Pointwise (exact jets)
inline constexpr double ricci_formula = 1e-10;
inline constexpr double bochner = 1e-9;
inline constexpr double cd_gap = 1e-9;
inline constexpr double cd_classical_match = 1e-12;

// Heat discretization invariants
inline constexpr double mass_conservation = 1e-10;
inline constexpr double self_adjointness = 1e-12;
inline constexpr double expm_rel_error = 1e-6;

// Grid inequality checks: tau(N) = C / N
inline constexpr double C_gradient = 2.0;
inline constexpr double C_reverse = 2.0;
inline constexpr double C_harnack = 2.0;
inline constexpr double C_entropy_wasserstein = 2.0;

inline constexpr double tau(double C, int N) { return C / N; }

}  // namespace folia::tol
