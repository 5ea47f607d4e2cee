#pragma once

#include <stdexcept>
#include <string>

namespace simwave {

// Error categories map onto the CLI exit codes: config=2, hypothesis=3, numerical=4.
enum class ErrorCategory { Config = 2, Hypothesis = 3, Numerical = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct GeometryError : Error {
    explicit GeometryError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct ResolutionError : Error {
    explicit ResolutionError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct SpecError : Error {
    explicit SpecError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct X0PlacementError : Error {
    explicit X0PlacementError(const std::string& m) : Error(ErrorCategory::Hypothesis, m) {}
};

struct IncompatibleCoefficients : Error {
    explicit IncompatibleCoefficients(const std::string& m) : Error(ErrorCategory::Hypothesis, m) {}
};

struct MissingC2 : Error {
    explicit MissingC2(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct CompatibilityError : Error {
    explicit CompatibilityError(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};

struct CFLError : Error {
    explicit CFLError(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};

struct NonFiniteError : Error {
    explicit NonFiniteError(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};

} // namespace simwave
