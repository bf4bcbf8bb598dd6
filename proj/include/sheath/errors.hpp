#pragma once

#include <stdexcept>
#include <string>

namespace sheath {

/// Raised when a numerical solve fails at runtime (vacuum, Newton divergence,
/// non-coercive operator). Input validation uses std::invalid_argument.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sheath
