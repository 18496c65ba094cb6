#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evoset {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  NotStochastic,
  Reducible,
  BadStationary,
  TooLarge,
  EmptyFamily,
  ZeroConductance,
  BelowFloor,
  EmptyRange,
  ZeroGauge,
  GammaZero,
  UnboundedIntegral,
  NotMixed,
  NotReversible,
  Disconnected,
  NoGiantComponent,
  BadDegree,
  EmptyStart,
  BadRange,
  MissingSeed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures are reported through this exception; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace evoset
