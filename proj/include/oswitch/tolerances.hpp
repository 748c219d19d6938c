#pragma once

namespace oswitch {

// Input-hygiene tolerance: branch probabilities of siblings must sum to 1
// within this bound, and the root probability must equal 1 within it.
inline constexpr double kProbSumTol = 1e-12;

// Tolerance for comparing derived quantities (conditional expectations,
// backward-induction values, performance indices) that accumulate rounding.
inline constexpr double kValueTol = 1e-9;

// Strictness margin for the triangle inequality on switching costs.
// gamma(i,k) must be below gamma(i,j) + gamma(j,k) by more than this.
inline constexpr double kStrictTriangleEps = 1e-12;

// Equality tolerance for the envelope-hits-gain test when locating optimal
// stopping nodes. The backward recursion returns the gain bit-identically
// whenever the max selects it, so this only guards expectation-branch ties.
inline constexpr double kHittingEqTol = 1e-9;

}  // namespace oswitch
