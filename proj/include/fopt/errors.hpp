#ifndef FOPT_ERRORS_HPP
#define FOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fopt {

// Raised when a numerical method cannot certify its result (e.g. the two
// Laplace-inversion backends disagree far beyond tolerance).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a path or estimator needs a crossing that never happened
// within the simulation horizon.
struct NotReachedError : std::runtime_error {
  explicit NotReachedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on malformed experiment configuration; carries a field path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fopt

#endif  // FOPT_ERRORS_HPP
