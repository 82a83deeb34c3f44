// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace bjlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Sizes or index arguments do not fit together.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Argument outside its documented domain (bad partition, bad pivot pair, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Iterative kernel ran out of its sweep budget before reaching tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// The requested neighbouring transposition would swap index-sharing pairs.
class NotAdmissible : public Error {
public:
    using Error::Error;
};

/// Operation requires a cyclic sequence (each pair exactly once).
class NotCyclic : public Error {
public:
    using Error::Error;
};

/// Search-based decision requested beyond its supported problem size.
class UnsupportedSize : public Error {
public:
    using Error::Error;
};

/// The diagonal-block conditioning guarantee could not be certified.
class UbcUnsatisfied : public Error {
public:
    using Error::Error;
};

/// Hyperbolic rotation parameter left the open unit interval.
class HyperbolicBreakdown : public Error {
public:
    using Error::Error;
};

/// Input matrix failed the positive-definiteness check.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// Matrix file or configuration could not be parsed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace bjlab
