#ifndef EXPDYN_ERROR_HPP
#define EXPDYN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace expdyn {

enum class ErrorCode {
  Syntax,
  InvalidArgument,
  Precondition,
  Undecided,
  SingularFloor,
  Overflow,
  RefinementCap,
  Infeasible,
  Io,
};

std::string_view errorCodeName(ErrorCode code);

/// Base of every error thrown by the library. The code is stable and is
/// what the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& what)
      : Error(ErrorCode::Syntax,
              "at position " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A lexicographic comparison could not be decided within the depth cap.
class UndecidedError : public Error {
 public:
  UndecidedError(std::size_t index, const std::string& what)
      : Error(ErrorCode::Undecided, what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace expdyn

#endif  // EXPDYN_ERROR_HPP
