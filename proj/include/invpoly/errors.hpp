#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace invpoly {

enum class ErrorKind {
  SyntaxError,
  NotSquare,
  SingularMatrix,
  NoPositiveWeights,
  GcdNotOne,
  NotAtomicSum,
  DegenerateLoop,
  UnsupportedGeometry,
  NotImplemented,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NoPositiveWeights: return "NoPositiveWeights";
    case ErrorKind::GcdNotOne: return "GcdNotOne";
    case ErrorKind::NotAtomicSum: return "NotAtomicSum";
    case ErrorKind::DegenerateLoop: return "DegenerateLoop";
    case ErrorKind::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorKind::NotImplemented: return "NotImplemented";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace invpoly
