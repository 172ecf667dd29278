#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvelab {

/// Malformed expression text. offset() is a byte offset into the input.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("offset " + std::to_string(offset) + ": " + what), offset_{offset} {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation hit a pole, a branch point, or an unbound parameter.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A geometric precondition failed (zero vector, dimension mismatch, non-reduced point).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scenario failed validation or admission.
class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace curvelab
