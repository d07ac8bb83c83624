#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cat0 {

// Bad argument: mismatched space tags, out-of-range parameters, invalid
// measures or metrics.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation not defined on this kind of space (tangent maps on a tree).
class UnsupportedSpaceError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DisconnectedGraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A transport plan whose residual graph has a negative cycle: the plan is
// not optimal, so no dual certificate exists.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario input rejected; `path` is a JSON path such as "$.maps.f.values[2]".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace cat0
