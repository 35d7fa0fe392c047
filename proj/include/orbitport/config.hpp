#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace orbitport {

// Shared numerical knobs. Every tolerance that a test or report depends on
// lives here so runs are reproducible from a single config; reports carry
// hash() so numbers can be traced back to the knobs that produced them.
struct Config {
    double newton_tol = 1e-12;  // relative Newton residual for ray solves
    double land_tol = 1e-6;     // landing-point convergence tolerance
    double cluster_eps = 1e-4;  // co-landing cluster radius
    double arc_tol = 1e-3;      // slack on measured arc-length assertions
    double h_big = 27.0;        // potential at which Q ~ Böttcher target
    double ratio = 0.75;        // geometric step of the potential grid
    double h_floor = 1e-30;     // deepest potential before NonConvergent
    std::uint64_t seed = 12345; // RNG seed for all sampling
    int threads = 1;            // worker threads for ray batches
    int iter_cap = 10000;       // escape-iteration cap for green()

    // Canonical "k=v;" serialization (stable key order).
    std::string canonical() const;
    // FNV-1a hash of canonical(), printed in reports as config id.
    std::uint64_t hash() const;

    // Parse "key = value" lines ('#' comments allowed); unknown keys reject.
    static Config from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
};

} // namespace orbitport
