#pragma once

#include <stdexcept>
#include <string>

namespace css {

// Failure categories shared by every module. The C API maps each kind onto a
// status code and the CLI onto its exit-code contract.
enum class ErrorKind {
  usage,        // caller broke a precondition (grid mismatch, bad argument)
  numeric,      // NaN/Inf produced or consumed
  capacity,     // requested resource bound too small (e.g. k_max < ell)
  degeneracy,   // operator too close to singular
  hypothesis,   // nonlinearity structurally violates a standing assumption
  growth,       // descent-scale bracketing failed
  convergence,  // iterative solver did not reach its tolerance
  config,       // run configuration rejected
  io            // filesystem failure
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace css
