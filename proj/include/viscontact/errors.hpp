#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace viscontact {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad geometry handed to a mesh builder (slit outside the body, gap too
/// large for the row height, ...).
struct GeometryError : Error {
  using Error::Error;
};

/// Text input that failed to parse; `line` is 1-based, 0 if unknown.
struct ParseError : Error {
  ParseError(const std::string& what, int line_number)
      : Error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + what : what),
        line(line_number) {}
  int line = 0;
};

/// Iterative solver ran out of its iteration budget.
struct NonconvergenceError : Error {
  NonconvergenceError(const std::string& what, double last_residual,
                      std::vector<double> residuals = {})
      : Error(what), residual(last_residual), history(std::move(residuals)) {}
  double residual = 0.0;
  std::vector<double> history;
};

}  // namespace viscontact
