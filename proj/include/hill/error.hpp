#pragma once

#include <stdexcept>
#include <string>

namespace hill {

/// Base class for every failure raised by the library.  Usage errors
/// (bad arguments) and computational failures are distinguished so the
/// CLI can map them onto different exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure did not reach its target.
class ComputationError : public Error {
public:
    using Error::Error;
};

class PoleError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class BranchCutError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class ConvergenceError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class StepSizeUnderflow : public ComputationError {
public:
    StepSizeUnderflow(const std::string& what, double where)
        : ComputationError(what), location(where) {}
    double location;
};

class SpectrumProximityError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class BoundaryZeroError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class QuadratureError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class CountMismatchError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// Emits a non-fatal diagnostic.  The default sink writes to stderr.
void warn(const std::string& message);

/// Replaces the warning sink; returns the previous one.
using WarningSink = void (*)(const std::string&);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace hill
