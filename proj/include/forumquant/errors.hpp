#pragma once

#include <stdexcept>
#include <string>

namespace fq {

enum class ErrorKind {
    kValidation,   // bad configuration or invariant violation in inputs
    kSchema,       // malformed record in an input file
    kIo,           // file system failure
    kOutOfRange,   // index or timestamp outside the available data
    kSingular,     // rank-deficient design / degenerate regression
    kInsufficient, // not enough observations for the requested statistic
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(std::size_t column, const std::string& column_name, const std::string& what)
        : Error(ErrorKind::kSingular, what), column_(column), column_name_(column_name) {}
    std::size_t column() const noexcept { return column_; }
    const std::string& column_name() const noexcept { return column_name_; }

private:
    std::size_t column_;
    std::string column_name_;
};

}  // namespace fq
