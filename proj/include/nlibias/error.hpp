#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlibias {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A corpus record could not be parsed. Carries the 1-based line number.
class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A corpus (or a required part of one) has no instances.
class EmptyCorpusError : public Error {
public:
    using Error::Error;
};

/// An argument is outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// remove() would drive a count below zero.
class DoubleRemovalError : public Error {
public:
    using Error::Error;
};

/// Two evaluation reports were computed on different test corpora.
class FingerprintMismatch : public Error {
public:
    using Error::Error;
};

} // namespace nlibias
