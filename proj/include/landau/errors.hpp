#pragma once
#include <stdexcept>
#include <string>

namespace landau {

/// Bad or unknown configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An artifact a pipeline depends on is missing (CLI exit code 3).
struct PrerequisiteMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solver divergence, failed orthogonality, NaNs (CLI exit code 4).
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace landau
