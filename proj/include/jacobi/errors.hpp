#pragma once

#include <stdexcept>
#include <string>

namespace jacobi {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { Config = 1, MathDomain = 2, NonConvergence = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(ErrorKind::Config, msg) {}
};

// Domain violations: turning-point margin, log of a nonpositive number,
// degenerate tangent planes, non-finite evaluations.
struct MathDomainError : Error {
  explicit MathDomainError(const std::string& msg) : Error(ErrorKind::MathDomain, msg) {}
};

// Iteration budgets exhausted: Newton search, linear solver, ODE step control.
struct NonConvergenceError : Error {
  explicit NonConvergenceError(const std::string& msg) : Error(ErrorKind::NonConvergence, msg) {}
};

}  // namespace jacobi
