#pragma once

#include <stdexcept>
#include <string>

namespace zgv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure of an iterative numerical kernel (maps to CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Bad user input: malformed files, inconsistent sizes (CLI exit code 2).
class InputError : public Error {
public:
    using Error::Error;
};

class SchurNoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularSylvester : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMass : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EigenvalueCollision : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateQuotient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StagnatedResidual : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OracleTooLarge : public InputError {
public:
    using InputError::InputError;
};

class InvalidMaterial : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class NonRealEntries : public InputError {
public:
    using InputError::InputError;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace zgv
