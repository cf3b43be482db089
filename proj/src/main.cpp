#include <string>

#include <CLI11.hpp>

#include "nlfront/dispatch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlfront: nonlocal-dispersal free-boundary front toolkit"};
  app.require_subcommand(1);

  nlfront::cli_options opt;
  struct sub_desc {
    const char* name;
    const char* help;
    bool resume;
  };
  const sub_desc subs[] = {
      {"validate", "check a configuration and print its fingerprint", false},
      {"simulate", "integrate the moving-domain problem", true},
      {"eigen", "principal eigenvalues over a list of half-lengths", false},
      {"ell-star", "threshold domain length for spreading", false},
      {"mu-star", "threshold front response via bisection", false},
      {"semiwave", "semi-wave profiles or the selected front speed", false},
      {"speed", "measured front slopes against the selected speed", false},
      {"accelerate", "growth-law fits for heavy-tailed kernels", false},
      {"harness", "ordered-pair comparison stress test", false},
  };
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("config", opt.config_path, "configuration file")->required();
    sc->add_option("--stamp", opt.stamp, "run directory name (default: UTC timestamp)");
    sc->add_flag("--emit-plotscript", opt.emit_plotscript,
                 "also write a gnuplot script into the run directory");
    if (s.resume)
      sc->add_option("--resume", opt.resume_path, "checkpoint file to continue from");
    sc->callback([&opt, name = std::string(s.name)]() { opt.subcommand = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return nlfront::dispatch(opt);
}
