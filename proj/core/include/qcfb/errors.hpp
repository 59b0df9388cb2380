#pragma once

#include <stdexcept>
#include <string>

namespace qcfb {

// Root of the library's exception hierarchy. The CLI maps the three concrete
// families onto process exit codes (parse 2, validation 3, numerical 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed netlist or operator literal. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

// Physically invalid input: mismatched registries, non-Hermitian Hamiltonians,
// unphysical bath parameters, xi >= kappa, ...
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The numerics failed: step-size underflow, negative eigenvalues beyond the
// clipping floor, degenerate steady states, truncation leaks.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcfb
