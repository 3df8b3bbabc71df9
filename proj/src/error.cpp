#include "css/error.hpp"

namespace css {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage-error";
    case ErrorKind::numeric: return "numeric-error";
    case ErrorKind::capacity: return "capacity-error";
    case ErrorKind::degeneracy: return "degeneracy-error";
    case ErrorKind::hypothesis: return "hypothesis-error";
    case ErrorKind::growth: return "growth-error";
    case ErrorKind::convergence: return "convergence-error";
    case ErrorKind::config: return "config-error";
    case ErrorKind::io: return "io-error";
  }
  return "unknown-error";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace css
