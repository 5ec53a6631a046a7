#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aeimpute {

/// Broad failure classes. The CLI maps each class to a distinct exit code.
enum class ErrorKind {
    Shape,
    InvalidConfiguration,
    InvalidArgument,
    Parse,
    Data,
    Unsupported,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& what) : Error(ErrorKind::Shape, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::InvalidConfiguration, what) {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

struct UnsupportedObjective : Error {
    explicit UnsupportedObjective(const std::string& what) : Error(ErrorKind::Unsupported, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Data-dependent failures: the input is well formed but cannot support the request.
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct IncompleteTrainingData : DataError {
    explicit IncompleteTrainingData(const std::string& what) : DataError(what) {}
};

struct NormalizationError : DataError {
    explicit NormalizationError(const std::string& what) : DataError(what) {}
};

struct DegenerateColumn : DataError {
    explicit DegenerateColumn(const std::string& what) : DataError(what) {}
};

struct InsufficientDonors : DataError {
    explicit InsufficientDonors(const std::string& what) : DataError(what) {}
};

struct NothingToImpute : DataError {
    explicit NothingToImpute(const std::string& what) : DataError(what) {}
};

/// Malformed input text. `row` and `column` are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t row, std::size_t column, const std::string& what)
        : Error(ErrorKind::Parse, format(source, row, column, what)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& source, std::size_t row, std::size_t column,
                              const std::string& what) {
        std::string out = source;
        if (row != 0) out += ":" + std::to_string(row);
        if (column != 0) out += ":" + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t row_;
    std::size_t column_;
};

}  // namespace aeimpute
