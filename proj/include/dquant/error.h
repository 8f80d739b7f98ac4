#pragma once

#include <stdexcept>
#include <string>

namespace dquant {

/// Raised for malformed or physically invalid user input (bad medium files,
/// singular linear response, unmatched mode triples). The CLI maps it to exit
/// code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class NonInvertibleResponse : public InputError {
 public:
  NonInvertibleResponse() : InputError("non-invertible linear response") {}
};

class NotHermitian : public std::invalid_argument {
 public:
  NotHermitian() : std::invalid_argument("Hamiltonian not Hermitian") {}
};

}  // namespace dquant
