#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transop {

enum class ErrorKind {
  NonFinite,
  DimensionMismatch,
  ConvergenceFailure,
  InvalidArgument,
  InvalidScale,
  IndexOutOfRange,
  FeatureMismatch,
  DegenerateData,
  DegenerateLabels,
  UnlabeledPoint,
  EmptyClass,
  Diverged,
  Io,
  Parse,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace transop
