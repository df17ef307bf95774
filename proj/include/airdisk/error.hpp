#pragma once

#include <stdexcept>
#include <string>

namespace airdisk {

enum class ErrorCode {
  input,        // malformed or invalid input data
  usage,        // invalid arguments to an operation
  infeasible,   // no schedule satisfies the constraints
  budget,       // search or period cap exceeded
  certificate,  // a construction certificate did not hold
  numeric,      // iterative solver failed to converge
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace airdisk
