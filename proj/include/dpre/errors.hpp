#ifndef DPRE_ERRORS_HPP
#define DPRE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dpre {

// Work volume exceeds the configured cap. Callers may lift caps explicitly
// (CLI --i-know); nothing in the engine ever truncates silently.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Bad or inconsistent run configuration (unknown mode, empty ladder, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Covariance matrix is singular where a nonsingular one is required.
struct SingularMatrixError : std::domain_error {
    explicit SingularMatrixError(const std::string& what) : std::domain_error(what) {}
};

// Fourier inversion could not push the truncation tail below the required
// fraction of the result within the allowed truncation range.
struct TailBoundError : std::runtime_error {
    explicit TailBoundError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dpre

#endif
