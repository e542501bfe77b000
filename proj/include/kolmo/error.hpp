// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kolmo {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bit stream did not contain a well-formed codeword.
class MalformedStream : public Error {
public:
    using Error::Error;
};

/// A textual or binary input could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A precondition on argument values was violated (mass sums, weights, bounds).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An approximator returned a value smaller than an earlier one.
class MonotonicityViolation : public Error {
public:
    using Error::Error;
};

/// Inputs produced under different machines, conditions, stages or bounds were combined.
class ProvenanceMismatch : public Error {
public:
    using Error::Error;
};

/// A conditional probability was requested on a condition of zero mass.
class UndefinedConditional : public Error {
public:
    using Error::Error;
};

/// An internal invariant failed; indicates a bug or an impossible input.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace kolmo
