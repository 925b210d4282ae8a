#pragma once

#include <stdexcept>
#include <string>

namespace feedaudit {

// Input data (file or in-memory) that fails a schema or invariant check.
// Messages carry "<path>:<line>" and the offending field when the source
// is a file.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A simulation configuration that violates its invariants; raised before
// any event is processed.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Lookup of a bot or publisher that is not present in the dataset.
class LookupError : public std::runtime_error {
public:
    explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level failure (open, read, write); message names the path.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// A linear solve that came back singular or too ill-conditioned to trust;
// message includes the condition estimate.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace feedaudit
