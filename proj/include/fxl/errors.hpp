#pragma once

#include <stdexcept>
#include <string>

namespace fxl {

// Caller passed arguments that violate an operation's preconditions.
class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// The computation itself reported a negative outcome (inconsistent system,
// unusable annihilator set, failed recovery). Distinct from usage_error so
// the CLI can map it to its own exit code.
class analysis_error : public std::runtime_error {
public:
    explicit analysis_error(const std::string& what) : std::runtime_error(what) {}
};

// An operation would exceed a configured memory or size budget.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what, std::size_t required_bytes = 0)
        : std::runtime_error(what), required_bytes(required_bytes) {}

    std::size_t required_bytes;
};

} // namespace fxl
