#ifndef KDVDG_ERRORS_HPP
#define KDVDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kdv {

/// Raised when the alternating face system is singular (N even or q odd).
class ParityError : public std::runtime_error {
public:
  explicit ParityError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested domain length is not a whole number of spatial
/// periods of the candidate solution. Carries the true period.
class PeriodicityError : public std::runtime_error {
public:
  PeriodicityError(const std::string& what, double true_period)
      : std::runtime_error(what), period(true_period) {}
  double period;
};

/// Raised when the implicit solve fails to reach tolerance.
class NewtonDivergenceError : public std::runtime_error {
public:
  NewtonDivergenceError(const std::string& what, int step, double residual)
      : std::runtime_error(what), step_index(step), last_residual(residual) {}
  int step_index;
  double last_residual;
};

/// Raised on invalid run configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kdv

#endif
