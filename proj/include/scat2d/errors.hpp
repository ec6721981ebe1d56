#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scat2d {

enum class ErrorKind {
  NonPositiveArgument,
  BadGridSpec,
  NonPositiveEnergy,
  BadOrder,
  IllConditionedSplit,
  BadPotentialSpec,
  SingularEnergy,
  NearSingularM,
  NoSignChange,
  NoObstruction,
  DecayFitUnstable,
  PhaseAliasing,
  UnconvergedCount,
  PResonancePresent,
  UnderResolved,
  GridMismatch,
  BoundaryContamination,
  ConfigParse,
};

constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorKind::BadGridSpec: return "BadGridSpec";
    case ErrorKind::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorKind::BadOrder: return "BadOrder";
    case ErrorKind::IllConditionedSplit: return "IllConditionedSplit";
    case ErrorKind::BadPotentialSpec: return "BadPotentialSpec";
    case ErrorKind::SingularEnergy: return "SingularEnergy";
    case ErrorKind::NearSingularM: return "NearSingularM";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::NoObstruction: return "NoObstruction";
    case ErrorKind::DecayFitUnstable: return "DecayFitUnstable";
    case ErrorKind::PhaseAliasing: return "PhaseAliasing";
    case ErrorKind::UnconvergedCount: return "UnconvergedCount";
    case ErrorKind::PResonancePresent: return "PResonancePresent";
    case ErrorKind::UnderResolved: return "UnderResolved";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::BoundaryContamination: return "BoundaryContamination";
    case ErrorKind::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (and the CLI) can report the module error by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace scat2d
