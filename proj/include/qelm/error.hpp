#ifndef QELM_ERROR_HPP
#define QELM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qelm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, non-Hermitian
// observable, invalid density matrix...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class PovmError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TrainingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyStatisticsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Process exit code for an exception escaping the CLI.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 1;
  if (dynamic_cast<const ContractViolation*>(&e) != nullptr) return 1;
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return 3;
  return 2;
}

}  // namespace qelm

#endif  // QELM_ERROR_HPP
