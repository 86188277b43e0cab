#pragma once

#include <stdexcept>
#include <string>

namespace edubayes {

enum class ErrorCode {
  InvalidArgument,  // caller broke a precondition or a model invariant
  IoError,          // filesystem trouble
  ParseError,       // malformed file content
  NumericError,     // degenerate or non-finite numerics (zero mass, infeasible moments, ...)
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorCode::IoError, msg); }
[[noreturn]] inline void throw_parse(const std::string& msg) {
  throw Error(ErrorCode::ParseError, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorCode::NumericError, msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw_invalid(msg);
}
inline void throw_parse_if(bool cond, const std::string& msg) {
  if (cond) throw_parse(msg);
}
inline void throw_io_if(bool cond, const std::string& msg) {
  if (cond) throw_io(msg);
}

}  // namespace edubayes
