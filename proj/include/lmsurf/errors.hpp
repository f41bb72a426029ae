#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lmsurf {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Division by (or inversion of) a double number on a null line.
class ZeroDivisor : public Error {
public:
    using Error::Error;
};

// Square root requested outside the principal branch (a negative null component).
class NoSquareRoot : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::string message, std::size_t offset, std::vector<std::string> expected)
        : Error(std::move(message)), offset_(offset), expected_(std::move(expected))
    {
    }

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

// Integration failed to converge, usually because a singularity lies on the path.
class DomainError : public Error {
public:
    using Error::Error;
};

class TimelikeViolation : public Error {
public:
    using Error::Error;
};

// The tangent plane is lightlike or singular, so no unit normal exists.
class DegenerateNormal : public Error {
public:
    using Error::Error;
};

// f*g' left the cone where the principal square root is defined.
class BranchError : public Error {
public:
    using Error::Error;
};

class StepFailure : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class InconclusiveOverlap : public Error {
public:
    using Error::Error;
};

} // namespace lmsurf
