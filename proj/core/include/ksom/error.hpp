#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksom {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters (grid size, schedule, level, k, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable data: parse failures, degenerate columns, too few values.
class DataError : public Error {
public:
    using Error::Error;
};

/// Model and data disagree on dimension or layout.
class MismatchError : public Error {
public:
    using Error::Error;
};

/// An observation with every component missing reached a distance computation.
class AllMissingError : public DataError {
public:
    AllMissingError() : DataError("observation has no present component") {}
    explicit AllMissingError(std::size_t row)
        : DataError("row " + std::to_string(row) + " has no present component"), row_(row), has_row_(true) {}

    bool has_row() const noexcept { return has_row_; }
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_ = 0;
    bool has_row_ = false;
};

}  // namespace ksom
