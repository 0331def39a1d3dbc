#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace modeleig {

/// Base class for every error raised by the library.
///
/// Each error carries a stable machine-readable code and the process exit
/// status the command-line front end maps it to.
class Error : public std::runtime_error {
  public:
    Error(std::string code, int exit_status, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)), exit_status_(exit_status)
    {}

    const std::string& code() const noexcept { return code_; }
    int exit_status() const noexcept { return exit_status_; }

  private:
    std::string code_;
    int exit_status_;
};

namespace detail {

/// Compact number formatting for diagnostics (std::to_string prints 1e-8 as 0.000000).
inline std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace detail

inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitNonConvergence = 3;

// Precondition violations (exit status 2).

class DomainError : public Error {
  public:
    explicit DomainError(const std::string& m) : Error("domain_error", kExitPrecondition, m) {}
};

class HypothesisError : public Error {
  public:
    explicit HypothesisError(const std::string& m) : Error("hypothesis_error", kExitPrecondition, m) {}
};

class InvalidInputError : public Error {
  public:
    explicit InvalidInputError(const std::string& m) : Error("invalid_input", kExitPrecondition, m) {}
};

class SchemaError : public Error {
  public:
    explicit SchemaError(const std::string& m) : Error("schema_error", kExitPrecondition, m) {}
};

class MonotonicityError : public Error {
  public:
    explicit MonotonicityError(const std::string& m) : Error("monotonicity_error", kExitPrecondition, m) {}
};

class NegativeValueError : public Error {
  public:
    explicit NegativeValueError(const std::string& m) : Error("negative_value", kExitPrecondition, m) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& m) : Error("io_error", kExitPrecondition, m) {}
};

class BracketError : public Error {
  public:
    explicit BracketError(const std::string& m) : Error("bracket_error", kExitPrecondition, m) {}
};

class CdConditionError : public Error {
  public:
    explicit CdConditionError(const std::string& m) : Error("cd_condition_violated", kExitPrecondition, m) {}
};

// Numerical failures (exit status 3).

class NonConvergenceError : public Error {
  public:
    explicit NonConvergenceError(const std::string& m) : Error("nonconvergence", kExitNonConvergence, m) {}
};

class StiffnessError : public Error {
  public:
    explicit StiffnessError(const std::string& m) : Error("stiffness", kExitNonConvergence, m) {}
};

} // namespace modeleig
