#pragma once

#include <stdexcept>
#include <string>

namespace hisd {

/// Raised for malformed user input: bad config values, broken files,
/// inconsistent datasets.  The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numeric routine fails (divergence, non-finite values).
/// The CLI maps this to exit code 1.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hisd
