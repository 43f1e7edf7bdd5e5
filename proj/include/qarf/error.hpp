#pragma once

#include <stdexcept>
#include <string>

namespace qarf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// The question is well posed but not decidable with the data at hand
// (window exhausted, semi-decided membership, ...).
class UnknownError : public Error {
public:
    using Error::Error;
};

// Malformed user input (words, JSON, expressions).
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace qarf
