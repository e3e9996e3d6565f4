#pragma once

#include <stdexcept>
#include <string>

namespace tlb {

enum class ErrorCode {
  invalid_argument = 1,
  infeasible = 2,
  io = 3,
  numeric = 4,
  internal = 5,
};

// Single exception type for the core; the C layer maps `code()` to a status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace tlb
