#include "evoset/error.hpp"

namespace evoset {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::Reducible: return "Reducible";
    case ErrorKind::BadStationary: return "BadStationary";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::ZeroConductance: return "ZeroConductance";
    case ErrorKind::BelowFloor: return "BelowFloor";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::ZeroGauge: return "ZeroGauge";
    case ErrorKind::GammaZero: return "GammaZero";
    case ErrorKind::UnboundedIntegral: return "UnboundedIntegral";
    case ErrorKind::NotMixed: return "NotMixed";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::NoGiantComponent: return "NoGiantComponent";
    case ErrorKind::BadDegree: return "BadDegree";
    case ErrorKind::EmptyStart: return "EmptyStart";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::MissingSeed: return "MissingSeed";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace evoset
