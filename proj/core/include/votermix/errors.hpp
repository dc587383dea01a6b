#pragma once

#include <stdexcept>
#include <string>

namespace votermix {

/// Thrown when a request exceeds a hard size guard (e.g. exact solves on
/// more states than fit the enumeration caps).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by the chain-spec and tree parsers; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Thrown when a stationary distribution is requested for a reducible kernel
/// and no explicit distribution was supplied by the caller.
class UnsupportedReducibleError : public std::runtime_error {
public:
    explicit UnsupportedReducibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace votermix
