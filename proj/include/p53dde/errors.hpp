#pragma once

#include <stdexcept>
#include <string>

namespace p53dde {

// Base for all domain errors so callers can catch the library family at once.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter set admits no positive equilibrium (e.g. a1 = 0 forces x1 -> 0).
struct NoEquilibriumError : Error {
    explicit NoEquilibriumError(const std::string& msg) : Error(msg) {}
};

// No purely imaginary crossing exists: the resolving polynomial has no
// positive real root, so the equilibrium never loses stability via delay.
struct NoHopfError : Error {
    explicit NoHopfError(const std::string& msg) : Error(msg) {}
};

// An internal cross-check failed (residual above tolerance); indicates a bug
// or an ill-conditioned input rather than a user error.
struct InconsistencyError : Error {
    explicit InconsistencyError(const std::string& msg) : Error(msg) {}
};

// 2*lambda1 or 0 is itself a characteristic root, so the center-manifold
// linear solves are singular.
struct ResonanceError : Error {
    explicit ResonanceError(const std::string& msg) : Error(msg) {}
};

// Crossing fails the simple-root or transversality requirement.
struct DegenerateCrossingError : Error {
    explicit DegenerateCrossingError(const std::string& msg) : Error(msg) {}
};

// Malformed config file or CLI input.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace p53dde
