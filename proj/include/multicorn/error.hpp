#pragma once

#include <stdexcept>
#include <string>

namespace multicorn {

enum class ErrorKind {
  non_finite,
  not_periodic,
  divergence,
  not_escaping,
  contour_failure,
  domain,
  unresolved,
  convergence,
  invalid_argument,
  time_budget,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::not_periodic: return "not_periodic";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::not_escaping: return "not_escaping";
    case ErrorKind::contour_failure: return "contour_failure";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unresolved: return "unresolved";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::time_budget: return "time_budget";
  }
  return "unknown";
}

/// Numerical failure raised by the library. Callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace multicorn
