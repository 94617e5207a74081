#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace andic {

enum class ErrorKind {
  invalid_distribution,
  absolute_continuity,
  conditioning,
  splitting_infeasible,
  non_termination,
  assumption_violation,
  out_of_range,
  quadrature,
  resolution,
  budget,
  parse,
  invalid_argument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_distribution: return "invalid_distribution";
    case ErrorKind::absolute_continuity: return "absolute_continuity";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::splitting_infeasible: return "splitting_infeasible";
    case ErrorKind::non_termination: return "non_termination";
    case ErrorKind::assumption_violation: return "assumption_violation";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::budget: return "budget";
    case ErrorKind::parse: return "parse";
    case ErrorKind::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

// Process exit status used by the CLI; one distinct code per kind.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return 2;
    case ErrorKind::invalid_argument: return 3;
    case ErrorKind::invalid_distribution: return 4;
    case ErrorKind::assumption_violation: return 5;
    case ErrorKind::absolute_continuity: return 6;
    case ErrorKind::conditioning: return 7;
    case ErrorKind::splitting_infeasible: return 8;
    case ErrorKind::out_of_range: return 9;
    case ErrorKind::quadrature: return 10;
    case ErrorKind::resolution: return 11;
    case ErrorKind::budget: return 12;
    case ErrorKind::non_termination: return 13;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace andic
