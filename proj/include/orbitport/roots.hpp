#pragma once

#include <complex>
#include <vector>

#include "orbitport/errors.hpp"

namespace orbitport {

// All complex roots of a_0 + a_1 z + ... + a_n z^n (coefficients low -> high,
// n >= 1, nonzero lead), with multiplicity, in no particular order. Weierstrass
// / Durand-Kerner simultaneous iteration; deterministic start configuration.
// Throws RootSolveFailure when the degree is < 1, the leading coefficient is
// zero, or the iteration fails to settle within max_iter sweeps.
std::vector<std::complex<double>> poly_roots(std::vector<std::complex<double>> coeffs,
                                             double tol = 1e-12,
                                             int max_iter = 2000);

} // namespace orbitport
