#pragma once

#include <stdexcept>
#include <string>

namespace dix {

// Error taxonomy mirrored by the CLI exit codes:
//   ValidationError -> 2, ParseError -> 3, IoError -> 4, ConvergenceError -> 5.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Unknown paper id in a graph lookup.
class LookupError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_criterion, int iterations)
        : Error(what), last_criterion_(last_criterion), iterations_(iterations) {}

    double last_criterion() const { return last_criterion_; }
    int iterations() const { return iterations_; }

private:
    double last_criterion_;
    int iterations_;
};

}  // namespace dix
