// errors.hpp: exception types shared by all qdimer modules

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdimer {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite or otherwise unusable argument.
struct InvalidInput : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of the operation.
struct DomainError : Error {
    using Error::Error;
};

// Result not representable in the working precision.
struct RangeError : Error {
    using Error::Error;
};

// Caller used an operation whose preconditions exclude the given parameters.
struct WrongOperation : Error {
    using Error::Error;
};

// The eigenbasis is defective (exceptional point): no biorthogonal pair exists.
struct DefectiveBasis : Error {
    using Error::Error;
};

// Observable is undefined for the given regime.
struct NotApplicable : Error {
    using Error::Error;
};

struct FieldViolation {
    std::string field;
    std::string message;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<FieldViolation> violations)
        : Error(summarize(violations)), violations_(std::move(violations)) {}

    const std::vector<FieldViolation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<FieldViolation>& v) {
        std::string out = "invalid parameters:";
        for (const auto& f : v) out += " [" + f.field + ": " + f.message + "]";
        return out;
    }

    std::vector<FieldViolation> violations_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_bound)
        : Error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

// Bracketing failure. residual_lo/hi are the function values at the endpoints.
class NoRootError : public Error {
public:
    enum class Side { BelowBracket, AboveBracket, NoSignChange };

    NoRootError(const std::string& what, Side side, double residual_lo, double residual_hi)
        : Error(what), side_(side), residual_lo_(residual_lo), residual_hi_(residual_hi) {}

    Side side() const noexcept { return side_; }
    double residual_lo() const noexcept { return residual_lo_; }
    double residual_hi() const noexcept { return residual_hi_; }

private:
    Side side_;
    double residual_lo_;
    double residual_hi_;
};

class StepSizeError : public Error {
public:
    StepSizeError(const std::string& what, double relative_change)
        : Error(what), relative_change_(relative_change) {}

    double relative_change() const noexcept { return relative_change_; }

private:
    double relative_change_;
};

class ConfigError : public Error {
public:
    ConfigError(int line, const std::string& message, const std::string& hint = {})
        : Error(format(line, message, hint)), line_(line), hint_(hint) {}

    int line() const noexcept { return line_; }
    const std::string& hint() const noexcept { return hint_; }

private:
    static std::string format(int line, const std::string& message, const std::string& hint) {
        std::string out = line > 0 ? "line " + std::to_string(line) + ": " + message : message;
        if (!hint.empty()) out += " (hint: " + hint + ")";
        return out;
    }

    int line_;
    std::string hint_;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& message)
        : Error(path + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace qdimer
