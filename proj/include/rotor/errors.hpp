#pragma once

#include <stdexcept>
#include <string>

namespace rotor {

// Raised when a computation degrades numerically (non-finite states,
// quadrature breakdown, fit windows too short). Distinct from
// std::invalid_argument, which signals bad configuration; the CLI maps the
// two to different exit codes.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rotor
