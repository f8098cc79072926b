// errors.hpp — exception taxonomy for the helimix library.
//
// Policy: fail loudly. Invalid configuration throws ConfigError, quadrature
// or linear-algebra trouble throws NumericsError, and a state-evolution
// breakdown (non-finite values, physicality violation) throws
// IntegrationError carrying the simulation time where it happened.
// Argument-domain violations (negative level index, z < 0) use
// std::domain_error directly.

#pragma once

#include <stdexcept>
#include <string>

namespace helimix {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationError : std::runtime_error {
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " (t = " + std::to_string(t) + " s)"),
          time(t) {}

    double time;  // simulation time at failure, s
};

}  // namespace helimix
