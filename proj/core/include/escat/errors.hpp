#pragma once

#include <stdexcept>
#include <string>

namespace escat {

// Thrown on malformed inputs (bad quantum numbers, bad configs, schema
// violations).  Maps to CLI exit status 1.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a numerical procedure fails (singular matching, propagation
// blow-up, non-finite values).  Maps to CLI exit status 2.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File/serialization problems (schema mismatch, truncation, NaN records).
// Maps to CLI exit status 1 as well (validation of external data).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace escat
