#pragma once

#include <stdexcept>
#include <string>

namespace nhssh {

enum class Errc {
  InvalidAmplitudes,
  NotApplicable,
  ChainTooShort,
  InvalidRequest,
  SolverError,
  NotAChiralPair,
  GaplessFactor,
  NumericalInconsistency,
  CriticalPoint,
  InvalidIndex,
  DeflationError,
  ConfigError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidAmplitudes: return "InvalidAmplitudes";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::ChainTooShort: return "ChainTooShort";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::SolverError: return "SolverError";
    case Errc::NotAChiralPair: return "NotAChiralPair";
    case Errc::GaplessFactor: return "GaplessFactor";
    case Errc::NumericalInconsistency: return "NumericalInconsistency";
    case Errc::CriticalPoint: return "CriticalPoint";
    case Errc::InvalidIndex: return "InvalidIndex";
    case Errc::DeflationError: return "DeflationError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code logic) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace nhssh
