#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace idealreg {

// Domain failures carry a stable machine-readable code alongside the human
// message; the command line tool serializes both.  Plain argument mistakes
// use std::invalid_argument and map to the code "invalid-argument".
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

inline DomainError overflow_error(const std::string& what) {
  return DomainError("overflow", what);
}

inline DomainError degenerate_input(const std::string& what) {
  return DomainError("degenerate-input", what);
}

inline DomainError insufficient_rows(const std::string& what) {
  return DomainError("insufficient-rows", what);
}

inline DomainError identifiability_violation(const std::string& what) {
  return DomainError("identifiability-violation", what);
}

inline DomainError insufficient_data(const std::string& what) {
  return DomainError("insufficient-data", what);
}

inline DomainError no_convergence(const std::string& what) {
  return DomainError("no-convergence", what);
}

inline DomainError parse_error(const std::string& what) {
  return DomainError("parse-error", what);
}

}  // namespace idealreg
