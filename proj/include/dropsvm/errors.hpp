#ifndef DROPSVM_ERRORS_HPP
#define DROPSVM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dropsvm {

/// Invalid hyperparameter or configuration value (e.g. dropout level q >= 1).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain of an operation (e.g. negative feature under
/// Poisson noise, mismatched dimensions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or unusable data files and datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed in a way the caller must hear about.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Emits a warning line on stderr unless warnings are silenced.
void warn(const std::string& message);

/// Globally enables or disables warn(). Returns the previous setting.
bool set_warnings_enabled(bool enabled);

}  // namespace dropsvm

#endif  // DROPSVM_ERRORS_HPP
