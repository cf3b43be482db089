#include "nlfront/errors.hpp"

namespace nlfront {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::invalid_parameter: return "InvalidParameter";
    case errc::normalization_failure: return "NormalizationFailure";
    case errc::quadrature_overflow: return "QuadratureOverflow";
    case errc::not_kpp: return "NotKPP";
    case errc::interval_empty: return "IntervalEmpty";
    case errc::no_convergence: return "NoConvergence";
    case errc::bracket_failure: return "BracketFailure";
    case errc::stability_violation: return "StabilityViolation";
    case errc::blow_up: return "BlowUp";
    case errc::bracket_invalid: return "BracketInvalid";
    case errc::undecided_budget: return "UndecidedBudget";
    case errc::truncation_too_shallow: return "TruncationTooShallow";
    case errc::divergent_flux: return "DivergentFlux";
    case errc::inconclusive: return "Inconclusive";
    case errc::window_too_short: return "WindowTooShort";
    case errc::model_mismatch: return "ModelMismatch";
    case errc::parse_error: return "ParseError";
    case errc::validation_error: return "ValidationError";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::corrupt_checkpoint: return "CorruptCheckpoint";
    case errc::config_drift: return "ConfigDrift";
    case errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

int exit_code_for(errc code) noexcept {
  switch (code) {
    case errc::parse_error: return 2;
    case errc::validation_error: return 3;
    case errc::invalid_parameter: return 4;
    case errc::normalization_failure: return 5;
    case errc::not_kpp: return 6;
    case errc::interval_empty: return 7;
    case errc::no_convergence: return 8;
    case errc::bracket_failure: return 9;
    case errc::stability_violation: return 10;
    case errc::blow_up: return 11;
    case errc::bracket_invalid: return 12;
    case errc::undecided_budget: return 13;
    case errc::truncation_too_shallow: return 14;
    case errc::divergent_flux: return 15;
    case errc::inconclusive: return 16;
    case errc::window_too_short: return 17;
    case errc::model_mismatch: return 18;
    case errc::version_mismatch: return 19;
    case errc::corrupt_checkpoint: return 20;
    case errc::config_drift: return 21;
    case errc::quadrature_overflow: return 22;
    case errc::io_failure: return 23;
  }
  return 1;
}

}  // namespace nlfront
