#include "orbitport/roots.hpp"

#include <algorithm>
#include <cmath>

namespace orbitport {

namespace {

std::complex<double> horner(const std::vector<std::complex<double>>& c,
                            std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

} // namespace

std::vector<std::complex<double>> poly_roots(std::vector<std::complex<double>> coeffs,
                                             double tol, int max_iter) {
    if (coeffs.size() < 2)
        throw RootSolveFailure("need degree >= 1, got " +
                               std::to_string(coeffs.empty() ? 0 : coeffs.size() - 1) +
                               " coefficients past the constant term");
    if (std::abs(coeffs.back()) == 0.0)
        throw RootSolveFailure("leading coefficient is zero");

    const std::complex<double> lead = coeffs.back();
    for (auto& c : coeffs) c /= lead;
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n == 1) return {-coeffs[0]};

    // Cauchy bound: all roots lie inside |z| <= 1 + max |a_k|.
    double bound = 0.0;
    for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(coeffs[k]));
    const double r0 = 0.8 * (1.0 + bound);

    std::vector<std::complex<double>> z(n);
    for (int i = 0; i < n; ++i) {
        // Offset start angles so real-axis symmetry cannot trap the sweep.
        double ang = 2.0 * M_PI * (i + 0.25) / n + 0.13;
        z[i] = r0 * std::complex<double>(std::cos(ang), std::sin(ang));
    }

    for (int it = 0; it < max_iter; ++it) {
        double max_step = 0.0, max_mod = 0.0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> den = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            if (std::abs(den) == 0.0) {
                // Coincident iterates: nudge apart and retry next sweep.
                z[i] += std::complex<double>(tol + 1e-9, 1e-9);
                max_step = 1.0;
                continue;
            }
            std::complex<double> delta = horner(coeffs, z[i]) / den;
            z[i] -= delta;
            max_step = std::max(max_step, std::abs(delta));
            max_mod = std::max(max_mod, std::abs(z[i]));
        }
        if (max_step < tol * (1.0 + max_mod)) return z;
    }
    throw RootSolveFailure("iteration did not settle within " +
                           std::to_string(max_iter) + " sweeps");
}

} // namespace orbitport
