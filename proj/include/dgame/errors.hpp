#pragma once

#include <stdexcept>
#include <string>

namespace dgame {

// Base for everything the library throws on contract violations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidActionError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite numbers encountered; carries the time at which they appeared.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double blame_time)
        : Error(what), blame_time_(blame_time) {}
    double blame_time() const noexcept { return blame_time_; }

private:
    double blame_time_;
};

/// A level set that should be nonempty (closed, nonempty slices) is empty.
class EmptyLevelSetError : public Error {
public:
    EmptyLevelSetError(const std::string& what, double t, double level)
        : Error(what), t_(t), level_(level) {}
    double time() const noexcept { return t_; }
    double level() const noexcept { return level_; }

private:
    double t_;
    double level_;
};

/// An experiment was refused because its hypotheses do not hold (e.g. Isaacs gap).
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace dgame
