#pragma once

#include <stdexcept>
#include <string>

namespace warplab {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (bad grids, non-positive weights, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Two samplings that are required to share a grid do not.
class GridMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// A parameter lies outside the range in which a statement is claimed.
class RangeError : public Error {
public:
    using Error::Error;
};

// A pole where w -> 0 but |w'| != 1; curvature is unbounded there.
class ConeSingularity : public Error {
public:
    ConeSingularity(const std::string& what, double r, double slope)
        : Error(what), r_(r), slope_(slope) {}
    double location() const noexcept { return r_; }
    double slope() const noexcept { return slope_; }

private:
    double r_;
    double slope_;
};

// An algebraic system has no admissible solution.
class NoSolution : public Error {
public:
    using Error::Error;
};

// An iterative method exhausted its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Failure inside a multi-stage pipeline; carries the stage id.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace warplab
