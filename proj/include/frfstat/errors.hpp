#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frfstat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument values, shape mismatches and other caller mistakes.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two objects that must share a grid or a length do not.
class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class GridError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class NonCommensurableFrequencies : public GridError {
public:
    using GridError::GridError;
};

class NyquistViolation : public GridError {
public:
    using GridError::GridError;
};

/// A bootstrap statistic could not be formed (zero spread, identical rows).
class DegenerateStatistics : public Error {
public:
    using Error::Error;
};

class DegenerateSpread : public DegenerateStatistics {
public:
    using DegenerateStatistics::DegenerateStatistics;
};

class ZeroSpread : public DegenerateStatistics {
public:
    using DegenerateStatistics::DegenerateStatistics;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : InvalidArgument(format(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t row, std::size_t column) {
        std::string out = what;
        if (row != 0) {
            out += " (row " + std::to_string(row);
            if (column != 0) out += ", column " + std::to_string(column);
            out += ")";
        }
        return out;
    }

    std::size_t row_;
    std::size_t column_;
};

}  // namespace frfstat
