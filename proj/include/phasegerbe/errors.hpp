#pragma once

#include <stdexcept>
#include <string>

namespace pg {

/// Thrown when an input violates a documented precondition (bad domain
/// bounds, grid too coarse for the requested phase resolution, point
/// outside the domain, ...).
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a numerical procedure fails to converge or the problem is
/// ill-posed at the given data (shooting cannot reach the target, orbit
/// unbounded at the requested energy, eigensolve failure).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pg
