#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subemb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid ensemble, test-set, or estimator parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
        : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

/// x == y passed to an increment computation.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Column resampling hit max_resamples without meeting the norm threshold.
class ResampleExhausted : public Error {
public:
    ResampleExhausted(std::size_t column, std::size_t attempts)
        : Error("column " + std::to_string(column) + " failed the norm threshold after " +
                std::to_string(attempts) + " attempts"),
          column_(column) {}

    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// An enumeration or sweep would exceed its hard work cap.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A count or value is not representable in the working precision.
class OverflowError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace subemb
