#pragma once

#include <stdexcept>
#include <string>

namespace rollwave {

// Base class. The category string is what the CLI reports and what
// decides the exit code.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

// Bad input: violated preconditions, malformed configuration.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& m) : Error("domain", m) {}
};

// Numerical failures (non-convergence, blowup, unresolved discretization).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& m, std::string category = "numerical")
        : Error(std::move(category), m) {}
};

class ResolutionError : public NumericalError {
public:
    explicit ResolutionError(const std::string& m) : NumericalError(m, "resolution") {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace rollwave
