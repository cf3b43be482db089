#pragma once

#include <string>

namespace nlfront {

struct cli_options {
  std::string subcommand;
  std::string config_path;
  std::string stamp;        // run directory name; a UTC timestamp when empty
  std::string resume_path;  // checkpoint to continue from (simulate only)
  bool emit_plotscript = false;
};

// Runs one subcommand end to end and returns the process exit code. Library
// failures are printed to stderr as
//   NLFRONT_ERROR code=<n> name=<Name> msg="..."
// and mapped to the code's distinct exit status; success prints a one-line
// summary on stdout and returns 0.
int dispatch(const cli_options& opt);

}  // namespace nlfront
