#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "torusdyn/geometry.hpp"

namespace torusdyn {

/// Floating-point blowup: a non-finite value or a coordinate beyond the escape bound.
class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by iterate() when the orbit leaves the escape box; keeps what was computed.
class OrbitEscape : public NumericalAbort {
public:
    OrbitEscape(const std::string& what, std::vector<Vec2> partial)
        : NumericalAbort(what), partial_(std::move(partial)) {}
    const std::vector<Vec2>& partial_orbit() const { return partial_; }

private:
    std::vector<Vec2> partial_;
};

/// A self-check that must never fail (deviation bound, determinant, ...).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace torusdyn
