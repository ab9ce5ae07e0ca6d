#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reslab {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of an operation (inadmissible exponent,
/// non-positive parameter, violated ordering precondition, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A bootstrap recurrence was asked for a successor whose denominator is not
/// positive; the case precondition was violated.
class LadderOverflow : public Error {
public:
    using Error::Error;
};

class UnboundConstant : public Error {
public:
    UnboundConstant(const std::string& what, std::vector<std::string> missing)
        : Error(what), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Iterative procedure exhausted its cap. Carries the best residuals seen.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best_residuals)
        : Error(what), best_(std::move(best_residuals)) {}
    const std::vector<double>& best_residuals() const noexcept { return best_; }

private:
    std::vector<double> best_;
};

class NearDegeneracyError : public Error {
public:
    using Error::Error;
};

/// Configuration could not be validated; `key_path` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key_path, const std::string& what)
        : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}
    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace reslab
