#ifndef NSBF_ERROR_HPP
#define NSBF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nsbf {

/// Invalid input: bad problem parameters, malformed config, violated preconditions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not deliver a usable result (overflow, failed search, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsbf

#endif  // NSBF_ERROR_HPP
