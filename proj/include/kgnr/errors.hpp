#pragma once

#include <stdexcept>
#include <string>

namespace kgnr {

// Invalid user-facing configuration (bad K, bad nonlinearity degree, malformed
// experiment description, ...). CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A resolution guard was violated (e.g. the reference integrator step is too
// coarse for the requested oscillation frequency). The run refuses to start.
// CLI maps this to exit code 2.
struct guard_violation : std::runtime_error {
    explicit guard_violation(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched grids or array lengths between operands.
struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& what) : std::runtime_error(what) {}
};

// Parameters outside the mathematically valid regime (degenerate mode
// frequency, complex data on the real-data-only correction path, ...).
struct parameter_error : std::runtime_error {
    explicit parameter_error(const std::string& what) : std::runtime_error(what) {}
};

// An internal consistency check failed (e.g. a provably real quantity came
// out with a large imaginary residue).
struct computation_error : std::runtime_error {
    explicit computation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kgnr
