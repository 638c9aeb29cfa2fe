#pragma once

#include <stdexcept>
#include <string>

namespace mrspec {

/// A spectral model breaks causality/invertibility or has a non-positive variance.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear algebra broke down (non positive-definite covariance and similar).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double smallest_pivot)
      : std::runtime_error(what + " (smallest pivot " + std::to_string(smallest_pivot) + ")"),
        smallest_pivot_(smallest_pivot) {}
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what), smallest_pivot_(0.0) {}

  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

}  // namespace mrspec
