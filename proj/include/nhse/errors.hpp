#pragma once

#include <stdexcept>
#include <string>

namespace nhse {

/// Numerical failure (eigensolver non-convergence, residual check, overflow).
/// Invalid inputs are reported with std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nhse
