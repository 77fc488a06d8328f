#pragma once

#include <stdexcept>
#include <string>

namespace roughkit {

// Malformed input: bad files, inconsistent dimensions, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  InputError(const std::string& module, const std::string& op, const std::string& what)
      : std::invalid_argument(module + "::" + op + ": " + what) {}
};

// A requested derivative order exceeds what a function declares.
class OrderError : public std::domain_error {
 public:
  OrderError(const std::string& module, const std::string& op, const std::string& what)
      : std::domain_error(module + "::" + op + ": " + what) {}
};

// Blow-up, non-finite values, failed factorizations.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& module, const std::string& op, const std::string& what)
      : std::runtime_error(module + "::" + op + ": " + what) {}
};

}  // namespace roughkit
