// End-to-end tests of the nlfront executable: run dirs, artifacts, stdout
// summaries, machine-readable error lines, exit codes, and checkpoint resume.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlfront/errors.hpp"

namespace fs = std::filesystem;
using nlfront::errc;
using nlfront::exit_code_for;

namespace {

fs::path scratch_root() {
  static fs::path root = [] {
    fs::path p = fs::temp_directory_path() /
                 ("nlfront_cli_" + std::to_string(static_cast<long>(::getpid())));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

struct cli_result {
  int code = -1;
  std::string out;
  std::string err;
};

cli_result run_cli(const std::string& args) {
  static int seq = 0;
  fs::path out_path = scratch_root() / ("stdout_" + std::to_string(seq));
  fs::path err_path = scratch_root() / ("stderr_" + std::to_string(seq));
  ++seq;
  std::string cmd = std::string("\"") + NLFRONT_CLI_PATH + "\" " + args + " > \"" +
                    out_path.string() + "\" 2> \"" + err_path.string() + "\"";
  int rc = std::system(cmd.c_str());
  cli_result res;
  res.code = (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  return res;
}

// First whitespace-delimited token following `key` (e.g. key "value=").
std::string token_after(const std::string& text, const std::string& key) {
  auto pos = text.find(key);
  REQUIRE_MESSAGE(pos != std::string::npos, "missing \"" << key << "\" in: " << text);
  pos += key.size();
  auto end = text.find_first_of(" \t\n", pos);
  if (end == std::string::npos) end = text.size();
  return text.substr(pos, end - pos);
}

double number_after(const std::string& text, const std::string& key) {
  return std::stod(token_after(text, key));
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

fs::path write_cfg(const std::string& name, const std::string& body) {
  fs::path p = scratch_root() / name;
  spit(p, body);
  return p;
}

std::string quote_arg(const fs::path& p) { return "\"" + p.string() + "\""; }

// Uniform-kernel logistic run with everything a short simulation needs.
std::string sim_cfg(const std::string& outdir, double t_max, double checkpoint_every,
                    double mu = 1.0) {
  std::ostringstream ss;
  ss << "[kernel]\nfamily = uniform\na_length = 1\n\n"
     << "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
     << "[sim]\nd_rate = 1\nmu_rate = " << mu << "\nh0_length = 1\n"
     << "dx_length = 0.1\ndt_time = 0.05\nT_max_time = " << t_max << "\n"
     << "record_every_time = 0.5\nu0_amplitude = 0.5\n"
     << "checkpoint_every_time = " << checkpoint_every << "\n\n"
     << "[output]\noutdir = " << outdir << "\nseed = 7\n";
  return ss.str();
}

const std::string data_dir = NLFRONT_TEST_DATA_DIR;

}  // namespace

TEST_CASE("validate accepts the full-surface golden config") {
  cli_result r = run_cli("validate " + quote_arg(data_dir + "/golden.cfg"));
  CAPTURE(r.err);
  CHECK(r.code == 0);
  CHECK(r.out.find("validate ok") != std::string::npos);
  CHECK(r.out.find("kernel=uniform") != std::string::npos);
  CHECK(r.out.find("reaction=logistic") != std::string::npos);
  std::string fp = token_after(r.out, "fingerprint=");
  CHECK(fp.size() == 16);
  CHECK(fp.find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("validate accepts a tabulated kernel loaded from disk") {
  fs::path cfg = write_cfg("tab.cfg",
                           "[kernel]\nfamily = tabulated\ntable_path = " + data_dir +
                               "/tri_kernel.txt\n");
  cli_result r = run_cli("validate " + quote_arg(cfg));
  CAPTURE(r.err);
  CHECK(r.code == 0);
  CHECK(r.out.find("kernel=tabulated") != std::string::npos);
}

TEST_CASE("configuration failures carry names, messages and exit codes") {
  SUBCASE("unknown key") {
    fs::path cfg = write_cfg("badkey.cfg", "[sim]\ndt = 0.05\n");
    cli_result r = run_cli("validate " + quote_arg(cfg));
    CHECK(r.code == exit_code_for(errc::validation_error));
    CHECK(r.err.find("NLFRONT_ERROR") != std::string::npos);
    CHECK(r.err.find("name=ValidationError") != std::string::npos);
    CHECK(r.err.find("[sim] dt") != std::string::npos);
  }
  SUBCASE("unknown section") {
    fs::path cfg = write_cfg("badsec.cfg", "[bogus]\nx = 1\n");
    cli_result r = run_cli("validate " + quote_arg(cfg));
    CHECK(r.code == exit_code_for(errc::validation_error));
    CHECK(r.err.find("unknown section") != std::string::npos);
  }
  SUBCASE("missing kernel table") {
    fs::path cfg = write_cfg("badtab.cfg",
                             "[kernel]\nfamily = tabulated\n"
                             "table_path = /nonexistent/table.txt\n");
    cli_result r = run_cli("validate " + quote_arg(cfg));
    CHECK(r.code == exit_code_for(errc::validation_error));
    CHECK(r.err.find("table_path") != std::string::npos);
  }
  SUBCASE("syntax error reports the line") {
    fs::path cfg = write_cfg("syntax.cfg", "[kernel]\nfamily uniform\n");
    cli_result r = run_cli("validate " + quote_arg(cfg));
    CHECK(r.code == exit_code_for(errc::parse_error));
    CHECK(r.err.find("name=ParseError") != std::string::npos);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
  SUBCASE("missing config file") {
    cli_result r = run_cli("validate /nonexistent/run.cfg");
    CHECK(r.code == exit_code_for(errc::io_failure));
    CHECK(r.err.find("name=IoFailure") != std::string::npos);
  }
  SUBCASE("usage errors exit nonzero") {
    CHECK(run_cli("frobnicate x.cfg").code != 0);
    CHECK(run_cli("validate").code != 0);
    CHECK(run_cli("").code != 0);
  }
}

TEST_CASE("simulate writes a complete, deterministic run directory") {
  std::string outdir = (scratch_root() / "sim_out").string();
  fs::path cfg = write_cfg("sim.cfg", sim_cfg(outdir, 2.0, 0.0));

  cli_result r1 = run_cli("simulate " + quote_arg(cfg) + " --stamp a");
  CAPTURE(r1.err);
  REQUIRE(r1.code == 0);
  CHECK(r1.out.find("simulate t=") != std::string::npos);
  CHECK(r1.out.find("outcome=") != std::string::npos);

  fs::path dir = fs::path(outdir) / "simulate" / "a";
  REQUIRE(fs::exists(dir / "series.csv"));
  REQUIRE(fs::exists(dir / "final_state.csv"));
  REQUIRE(fs::exists(dir / "manifest.txt"));

  std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("command = simulate") != std::string::npos);
  CHECK(manifest.find("fingerprint = ") != std::string::npos);
  CHECK(manifest.find("[kernel]") != std::string::npos);

  std::string series = slurp(dir / "series.csv");
  CHECK(series.rfind("t,g,h,sup_u,mass,right_flux,left_flux\n", 0) == 0);
  CHECK(line_count(series) == 6);  // header + records at t = 0, 0.5, ..., 2
  std::string final_state = slurp(dir / "final_state.csv");
  CHECK(final_state.rfind("x,u\n", 0) == 0);

  // A second run of the same config lands byte-identical artifacts.
  cli_result r2 = run_cli("simulate " + quote_arg(cfg) + " --stamp b --emit-plotscript");
  REQUIRE(r2.code == 0);
  fs::path dir_b = fs::path(outdir) / "simulate" / "b";
  CHECK(slurp(dir_b / "series.csv") == series);
  CHECK(slurp(dir_b / "final_state.csv") == final_state);
  CHECK(slurp(dir_b / "plot.gp").find("plot 'series.csv'") != std::string::npos);

  // Without --stamp the run dir is a fresh timestamp, printed on stdout.
  cli_result r3 = run_cli("simulate " + quote_arg(cfg));
  REQUIRE(r3.code == 0);
  fs::path stamped = token_after(r3.out, "dir=");
  CHECK(fs::exists(stamped / "series.csv"));
}

TEST_CASE("simulate resumes from a checkpoint byte-for-byte") {
  std::string outdir = (scratch_root() / "resume_out").string();
  fs::path cfg_short = write_cfg("resume_short.cfg", sim_cfg(outdir, 2.0, 0.5));
  fs::path cfg_long = write_cfg("resume_long.cfg", sim_cfg(outdir, 4.0, 0.5));

  REQUIRE(run_cli("simulate " + quote_arg(cfg_short) + " --stamp part").code == 0);
  fs::path part = fs::path(outdir) / "simulate" / "part";
  REQUIRE(fs::exists(part / "checkpoint.txt"));
  std::string ckpt = slurp(part / "checkpoint.txt");
  CHECK(ckpt.rfind("nlfront-checkpoint-v1\n", 0) == 0);
  CHECK(ckpt.find("checksum ") != std::string::npos);

  // Continue under a longer horizon in the same run dir...
  cli_result rr = run_cli("simulate " + quote_arg(cfg_long) + " --resume " +
                          quote_arg(part / "checkpoint.txt") + " --stamp part");
  CAPTURE(rr.err);
  REQUIRE(rr.code == 0);

  // ...and compare against one uninterrupted run of the longer horizon.
  REQUIRE(run_cli("simulate " + quote_arg(cfg_long) + " --stamp full").code == 0);
  fs::path full = fs::path(outdir) / "simulate" / "full";
  CHECK(slurp(part / "series.csv") == slurp(full / "series.csv"));
  CHECK(slurp(part / "final_state.csv") == slurp(full / "final_state.csv"));

  SUBCASE("a physics change refuses to resume") {
    fs::path cfg_drift = write_cfg("resume_drift.cfg", sim_cfg(outdir, 4.0, 0.5, 2.0));
    cli_result r = run_cli("simulate " + quote_arg(cfg_drift) + " --resume " +
                           quote_arg(part / "checkpoint.txt") + " --stamp drift");
    CHECK(r.code == exit_code_for(errc::config_drift));
    CHECK(r.err.find("name=ConfigDrift") != std::string::npos);
    CHECK(r.err.find("T_max_time") != std::string::npos);
  }
  SUBCASE("a flipped byte fails the checksum") {
    std::string bad = ckpt;
    auto pos = bad.find("fingerprint ") + 12;
    bad[pos] = bad[pos] == '0' ? '1' : '0';
    fs::path bad_path = scratch_root() / "bad_checkpoint.txt";
    spit(bad_path, bad);
    cli_result r = run_cli("simulate " + quote_arg(cfg_long) + " --resume " +
                           quote_arg(bad_path) + " --stamp corrupt");
    CHECK(r.code == exit_code_for(errc::corrupt_checkpoint));
    CHECK(r.err.find("name=CorruptCheckpoint") != std::string::npos);
  }
  SUBCASE("a foreign file is rejected by its header") {
    fs::path alien = scratch_root() / "alien_checkpoint.txt";
    spit(alien, "acme-checkpoint-v9\nnothing to see\n");
    cli_result r = run_cli("simulate " + quote_arg(cfg_long) + " --resume " +
                           quote_arg(alien) + " --stamp alien");
    CHECK(r.code == exit_code_for(errc::version_mismatch));
    CHECK(r.err.find("name=VersionMismatch") != std::string::npos);
  }
}

TEST_CASE("eigen sweeps lengths and reports translation deviation") {
  std::string outdir = (scratch_root() / "eigen_out").string();
  fs::path cfg = write_cfg("eigen.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 2\n\n"
                           "[eigen]\nl_list = 0.45, 1\nn_nodes = 129\ntranslations = 2\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("eigen " + quote_arg(cfg) + " --stamp e");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("eigen lengths=2") != std::string::npos);
  CHECK(number_after(r.out, "max_translation_dev=") <= 1e-8);

  std::string csv = slurp(fs::path(outdir) / "eigen" / "e" / "eigen.csv");
  CHECK(csv.rfind("l,n,lambda_p,residual,iterations\n", 0) == 0);
  REQUIRE(line_count(csv) == 3);
  // On [-0.45, 0.45] every node pair sits strictly inside the unit support,
  // so constants are exact eigenvectors: lambda = d*(2l)/2 + f0 - d = -0.1;
  // the longer interval must improve on it.
  std::istringstream rows(csv);
  std::string header, row1, row2;
  std::getline(rows, header);
  std::getline(rows, row1);
  std::getline(rows, row2);
  auto lambda_of = [](const std::string& row) {
    auto c1 = row.find(',');
    auto c2 = row.find(',', c1 + 1);
    auto c3 = row.find(',', c2 + 1);
    return std::stod(row.substr(c2 + 1, c3 - c2 - 1));
  };
  double l1 = lambda_of(row1), l2 = lambda_of(row2);
  CHECK(std::abs(l1 + 0.1) <= 1e-6);
  CHECK(l2 > l1 + 1e-3);
  CHECK(number_after(r.out, "last_lambda_p=") == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("ell-star solves the threshold length from the config rates") {
  std::string outdir = (scratch_root() / "ellstar_out").string();
  fs::path cfg = write_cfg("ellstar.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 2\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("ell-star " + quote_arg(cfg) + " --stamp l");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  double value = number_after(r.out, "value=");
  CHECK(value == doctest::Approx(1.0).epsilon(5e-3));
  std::string result = slurp(fs::path(outdir) / "ell-star" / "l" / "result.txt");
  CHECK(result.find("ell_star = ") != std::string::npos);
}

TEST_CASE("speed reports measured front slopes") {
  std::string outdir = (scratch_root() / "speed_out").string();
  fs::path cfg = write_cfg("speed.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 1\nmu_rate = 1\nh0_length = 1\n"
                           "dx_length = 0.1\ndt_time = 0.05\nT_max_time = 30\n"
                           "record_every_time = 0.5\nu0_amplitude = 0.5\n\n"
                           "[speed]\nwindow_frac = 0.5\nuse_theory = false\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("speed " + quote_arg(cfg) + " --stamp s");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  double right = number_after(r.out, "right=");
  double left = number_after(r.out, "left=");
  CHECK(right > 0.1);
  CHECK(right < 1.0);
  // Symmetric problem: the left front expands at the mirrored rate (the
  // left fit reports the slope of -g, so both come out positive).
  CHECK(left == doctest::Approx(right).epsilon(0.05));
  std::string result = slurp(fs::path(outdir) / "speed" / "s" / "result.txt");
  CHECK(result.find("right_slope = ") != std::string::npos);
  CHECK(result.find("window = [") != std::string::npos);
  CHECK(result.find("c0_right") == std::string::npos);  // theory was disabled
}

TEST_CASE("semiwave profiles at pinned speeds") {
  std::string outdir = (scratch_root() / "semiwave_out").string();
  fs::path cfg = write_cfg("semiwave_pinned.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 1\nmu_rate = 1\n\n"
                           "[semiwave]\nc_list = 0.6\nX_depth_length = 12\n"
                           "n_nodes = 768\ndelta_floor = 0.001\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("semiwave " + quote_arg(cfg) + " --stamp p");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("c=0.6:SemiWave:m=") != std::string::npos);

  fs::path dir = fs::path(outdir) / "semiwave" / "p";
  std::string profile = slurp(dir / "profile_0.csv");
  CHECK(profile.rfind("x,phi\n", 0) == 0);
  CHECK(line_count(profile) == 770);  // header + 769 nodes
  std::string result = slurp(dir / "result.txt");
  CHECK(result.find("kind = SemiWave") != std::string::npos);
  CHECK(result.find("m = ") != std::string::npos);
}

TEST_CASE("semiwave solves for the selected speed when no list is given") {
  std::string outdir = (scratch_root() / "c0_out").string();
  fs::path cfg = write_cfg("semiwave_solve.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 1\nmu_rate = 1\n\n"
                           "[semiwave]\nX_depth_length = 12\nn_nodes = 768\n"
                           "delta_floor = 0.001\ntol = 0.01\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("semiwave " + quote_arg(cfg) + " --stamp c0");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  double c0 = number_after(r.out, "c0=");
  CHECK(c0 > 0.1);
  CHECK(c0 < 0.9051);  // below the linear selection bound
  CHECK(number_after(r.out, "m=") > 0.0);

  fs::path dir = fs::path(outdir) / "semiwave" / "c0";
  CHECK(line_count(slurp(dir / "bracket.csv")) >= 4);
  CHECK(slurp(dir / "profile.csv").rfind("x,phi\n", 0) == 0);
  CHECK(slurp(dir / "result.txt").find("c0 = ") != std::string::npos);
}

TEST_CASE("mu-star brackets the spreading threshold end to end") {
  std::string outdir = (scratch_root() / "mustar_out").string();
  fs::path cfg = write_cfg("mustar.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 2\nmu_rate = 1\nh0_length = 0.25\n"
                           "dx_length = 0.05\ndt_time = 0.1\nT_max_time = 60\n"
                           "record_every_time = 1\nu0_amplitude = 0.5\n\n"
                           "[mu_star]\nmu_lo_rate = 0.01\nmu_hi_rate = 8\nrel_tol = 0.2\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("mu-star " + quote_arg(cfg) + " --stamp m");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  double mu = number_after(r.out, "value=");
  CHECK(mu > 0.01);
  CHECK(mu < 8.0);
  std::string result = slurp(fs::path(outdir) / "mu-star" / "m" / "result.txt");
  CHECK(result.find("mu_star = ") != std::string::npos);
  CHECK(result.find("ell_star = ") != std::string::npos);
}

TEST_CASE("accelerate fits the front growth of a heavy-tailed run") {
  std::string outdir = (scratch_root() / "accel_out").string();
  fs::path cfg = write_cfg("accel.cfg",
                           "[kernel]\nfamily = power_tail\nalpha = 1.5\nlambda = 0.25\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 1\nmu_rate = 1\nh0_length = 1\n"
                           "dt_time = 0.2\nT_max_time = 400\nrecord_every_time = 0.25\n"
                           "u0_amplitude = 0.5\nmesh = graded\nstop_at_h_length = 30\n\n"
                           "[accelerate]\nmodel = power\nwindow_frac = 0.5\n\n"
                           "[output]\noutdir = " + outdir + "\n");
  cli_result r = run_cli("accelerate " + quote_arg(cfg) + " --stamp g");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("model=power") != std::string::npos);
  double exponent = number_after(r.out, "exponent=");
  CHECK(exponent > 1.2);  // super-linear: genuine acceleration
  CHECK(exponent < 3.2);
  CHECK(number_after(r.out, "r2=") > 0.9);
  std::string result = slurp(fs::path(outdir) / "accelerate" / "g" / "result.txt");
  CHECK(result.find("model = power") != std::string::npos);
  CHECK(result.find("n_points = ") != std::string::npos);
}

TEST_CASE("harness compares ordered pairs and reports violations") {
  std::string outdir = (scratch_root() / "harness_out").string();
  fs::path cfg = write_cfg("harness.cfg",
                           "[kernel]\nfamily = uniform\na_length = 1\n\n"
                           "[reaction]\nfamily = logistic\nr_rate = 1\n\n"
                           "[sim]\nd_rate = 1\nmu_rate = 1\nh0_length = 1\n"
                           "dx_length = 0.1\ndt_time = 0.05\nT_max_time = 4\n"
                           "record_every_time = 1\nu0_amplitude = 0.5\n\n"
                           "[harness]\nn_pairs = 3\n\n"
                           "[output]\noutdir = " + outdir + "\nseed = 20260814\n");
  cli_result r = run_cli("harness " + quote_arg(cfg) + " --stamp h");
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("pairs=3") != std::string::npos);
  CHECK(r.out.find("violations=0") != std::string::npos);
  std::string report = slurp(fs::path(outdir) / "harness" / "h" / "report.txt");
  CHECK(report.find("total_violations = 0") != std::string::npos);
  CHECK(report.find("pair 2 ") != std::string::npos);
}
