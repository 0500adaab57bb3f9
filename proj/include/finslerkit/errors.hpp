#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fk {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error("parse error at offset " + std::to_string(offset) + ": " + message),
          offset_(offset), detail_(message) {}

    std::size_t offset() const { return offset_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t offset_;
    std::string detail_;
};

// Evaluation outside a function's domain (log of non-positive, sqrt of negative, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Division by a quantity whose value is (numerically) zero.
class SingularDivisionError : public DomainError {
public:
    using DomainError::DomainError;
};

// A derivative was requested beyond the configured truncation order.
class OrderBudgetError : public Error {
public:
    using Error::Error;
};

class HomogeneityError : public Error {
public:
    using Error::Error;
};

class RegularityError : public Error {
public:
    using Error::Error;
};

class FrameUndefinedError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fk
