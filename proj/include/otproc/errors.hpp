#pragma once

#include <stdexcept>
#include <string>

namespace otproc {

// Base error carrying the CLI exit-code category:
// 1 = usage/config error, 2 = data validation error, 3 = numerical failure.
class Error : public std::runtime_error {
public:
    Error(const std::string& message, int exit_code)
        : std::runtime_error(message), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(m, 1) {}
};
struct InvalidParameterError : Error {
    explicit InvalidParameterError(const std::string& m) : Error(m, 1) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(m, 1) {}
};

struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& m) : Error(m, 2) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(m, 2) {}
};
struct IncompatibleGridError : Error {
    explicit IncompatibleGridError(const std::string& m) : Error(m, 2) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error(m, 2) {}
};
struct LookupError : Error {
    explicit LookupError(const std::string& m) : Error(m, 2) {}
};
struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& m) : Error(m, 2) {}
};

struct DegenerateWindowError : Error {
    explicit DegenerateWindowError(const std::string& m) : Error(m, 3) {}
};
struct DegenerateBaselineError : Error {
    explicit DegenerateBaselineError(const std::string& m) : Error(m, 3) {}
};
struct NotEstimableError : Error {
    explicit NotEstimableError(const std::string& m) : Error(m, 3) {}
};
struct ConditioningError : Error {
    explicit ConditioningError(const std::string& m) : Error(m, 3) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& m) : Error(m, 3) {}
};

}  // namespace otproc
