#pragma once

#include <stdexcept>
#include <string>

namespace nlfront {

// Every failure mode the library can raise, one code per contract violation.
enum class errc {
  invalid_parameter,
  normalization_failure,
  quadrature_overflow,
  not_kpp,
  interval_empty,
  no_convergence,
  bracket_failure,
  stability_violation,
  blow_up,
  bracket_invalid,
  undecided_budget,
  truncation_too_shallow,
  divergent_flux,
  inconclusive,
  window_too_short,
  model_mismatch,
  parse_error,
  validation_error,
  version_mismatch,
  corrupt_checkpoint,
  config_drift,
  io_failure,
};

// Stable CamelCase name used in messages, machine-readable error lines and exit-code docs.
const char* errc_name(errc code) noexcept;

// Distinct nonzero process exit code for each errc.
int exit_code_for(errc code) noexcept;

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

}  // namespace nlfront
