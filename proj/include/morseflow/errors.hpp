#pragma once

#include <stdexcept>
#include <string>

namespace morseflow {

/// Thrown when an iterative procedure fails to converge. Carries the last
/// estimate so callers can still inspect how far the computation got.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string &what, double last_estimate = 0.0)
        : std::runtime_error(what), last_estimate_(last_estimate) {}

    double last_estimate() const { return last_estimate_; }

private:
    double last_estimate_;
};

/// Thrown when a computed object violates a structural expectation
/// (wrong zero count, boundary mismatch after correction, ...).
class structural_error : public std::runtime_error {
public:
    explicit structural_error(const std::string &what) : std::runtime_error(what) {}
};

} // namespace morseflow
