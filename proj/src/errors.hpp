#pragma once
#include <stdexcept>
#include <string>

namespace qsp {

// Coarse classification used by the C API to map failures onto status codes.
enum class ErrorCode {
  invalid_argument,
  parse,
  not_hermitian,
  sparsity_exceeded,
  zero_hamiltonian,
  cap_exceeded,
  synthesis,
  bound_violation,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace qsp
