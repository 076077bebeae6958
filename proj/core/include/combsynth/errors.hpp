#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace combsynth {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// eval() was handed a string outside the combiner's legal input set, or the
// evaluation rules have no applicable case for the given pair.
struct DomainError : Error {
    using Error::Error;
};

// A string helper required line/delimiter structure that is absent.
struct StructureError : Error {
    using Error::Error;
};

// add would exceed the 64-bit signed range.
struct OverflowError : Error {
    using Error::Error;
};

// Malformed combiner serialization or pipeline script.
struct ParseError : Error {
    ParseError(const std::string& msg, size_t position)
        : Error(msg + " (at offset " + std::to_string(position) + ")"), pos(position) {}
    size_t pos;
};

// Subprocess failures.
struct ExecError : Error {
    using Error::Error;
};
struct SpawnError : ExecError {
    using ExecError::ExecError;
};
struct TimeoutError : ExecError {
    using ExecError::ExecError;
};
struct NonZeroExit : ExecError {
    NonZeroExit(int exit_code, const std::string& stderr_excerpt)
        : ExecError("command exited with status " + std::to_string(exit_code) +
                    (stderr_excerpt.empty() ? "" : ": " + stderr_excerpt)),
          code(exit_code),
          stderr_excerpt(stderr_excerpt) {}
    int code;
    std::string stderr_excerpt;
};

// Input generation could not satisfy the requested shape.
struct GenError : Error {
    using Error::Error;
};

// All input-class probes failed for a command.
struct ProbeError : Error {
    using Error::Error;
};

// Pipeline script uses syntax outside the supported subset.
struct UnsupportedSyntax : Error {
    UnsupportedSyntax(const std::string& msg, size_t position)
        : Error(msg + " (at offset " + std::to_string(position) + ")"), pos(position) {}
    size_t pos;
};

// Synthesis preprocessing could not classify the command at all.
struct UnsupportedCommand : Error {
    using Error::Error;
};

// Intersection sampling found no pair legal for both combiners.
struct EmptyIntersection : Error {
    using Error::Error;
};

// enough_for() was called on a combiner outside the representative set.
struct NotRepresentative : Error {
    using Error::Error;
};

}  // namespace combsynth
