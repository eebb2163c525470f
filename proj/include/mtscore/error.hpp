#ifndef MTSCORE_ERROR_HPP_
#define MTSCORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mtscore {

// Operand shapes do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input data (files, tables, text) failed validation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical probe produced a non-finite value.
class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtscore

#endif  // MTSCORE_ERROR_HPP_
