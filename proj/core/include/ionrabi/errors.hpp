#pragma once

#include <stdexcept>
#include <string>

namespace ionrabi {

/// Base class of every error raised by the library. Argument validation
/// failures use std::invalid_argument instead.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SpaceMismatch : public Error
{
public:
    using Error::Error;
};

/// No root of f1(n, .) inside the scanned bracket.
class NoSignChange : public Error
{
public:
    NoSignChange(int n, double lo, double hi)
        : Error("f1(" + std::to_string(n) + ", eta) has no sign change on [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          lo_(lo), hi_(hi)
    {
    }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

class TruncationTooSmall : public Error
{
public:
    TruncationTooSmall(const std::string& what, int required_n_max)
        : Error(what + " (need n_max >= " + std::to_string(required_n_max) + ")"),
          required_(required_n_max)
    {
    }
    int required_n_max() const noexcept { return required_; }

private:
    int required_;
};

class StepTooLarge : public Error
{
public:
    using Error::Error;
};

class PositivityLoss : public Error
{
public:
    using Error::Error;
};

class NoBarrier : public Error
{
public:
    using Error::Error;
};

class ConvergenceFailure : public Error
{
public:
    using Error::Error;
};

/// Scenario file problems. line() is 1-based, or 0 when unknown.
class SchemaError : public Error
{
public:
    SchemaError(const std::string& what, int line = 0, std::string key = {})
        : Error(format(what, line, key)), line_(line), key_(std::move(key))
    {
    }
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& what, int line, const std::string& key)
    {
        std::string out = "schema error";
        if (line > 0)
            out += " at line " + std::to_string(line);
        if (!key.empty())
            out += " (key '" + key + "')";
        return out + ": " + what;
    }

    int line_;
    std::string key_;
};

} // namespace ionrabi
