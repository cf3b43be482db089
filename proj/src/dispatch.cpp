#include "nlfront/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nlfront/checkpoint.hpp"
#include "nlfront/config.hpp"
#include "nlfront/errors.hpp"
#include "nlfront/experiments.hpp"
#include "nlfront/fixed_domain.hpp"
#include "nlfront/free_boundary.hpp"
#include "nlfront/io.hpp"
#include "nlfront/kernels.hpp"
#include "nlfront/reactions.hpp"
#include "nlfront/semiwave.hpp"

namespace nlfront {

namespace {

run_config load_config(const std::string& path) {
  if (path.empty()) fail(errc::invalid_parameter, "missing config path");
  return resolve_config(parse_config(read_file(path)));
}

std::string run_dir(const run_config& rc, const cli_options& opt) {
  std::string stamp = opt.stamp.empty() ? timestamp_utc() : opt.stamp;
  std::string base = rc.output.outdir + "/" + opt.subcommand + "/" + stamp;
  if (opt.stamp.empty()) {
    std::string dir = base;
    int suffix = 1;
    while (std::filesystem::exists(dir) && suffix < 10000)
      dir = base + "-" + std::to_string(suffix++);
    base = dir;
  }
  ensure_dirs(base);
  return base;
}

void write_manifest(const std::string& dir, const run_config& rc,
                    const cli_options& opt) {
  std::string m;
  m += "command = " + opt.subcommand + "\n";
  m += "fingerprint = " + hex16(config_fingerprint(rc)) + "\n\n";
  m += serialize_config(to_raw(rc));
  write_file(dir + "/manifest.txt", m);
}

std::string csv_row(const series_row& r) {
  return format_g(r.t) + "," + format_g(r.g) + "," + format_g(r.h) + "," +
         format_g(r.sup_u) + "," + format_g(r.mass) + "," + format_g(r.right_flux) +
         "," + format_g(r.left_flux) + "\n";
}

std::string profile_csv(const std::vector<double>& x, const std::vector<double>& phi) {
  std::string out = "x,phi\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out += format_g(x[i]) + "," + format_g(phi[i]) + "\n";
  return out;
}

double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Floors below 0.02 descend through a fixed ladder so nearby floors share
// their leading probes.
std::vector<double> delta_ladder(double floor_v) {
  std::vector<double> seq;
  for (double v : {2e-2, 5e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7})
    if (v > floor_v * 1.0000001) seq.push_back(v);
  seq.push_back(floor_v);
  return seq;
}

int cmd_validate(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  std::printf("validate ok kernel=%s reaction=%s fingerprint=%s\n",
              kernel_family_name(rc.kernel_params.family),
              reaction_family_name(rc.reaction_params.family),
              hex16(config_fingerprint(rc)).c_str());
  return 0;
}

void write_sim_plotscript(const std::string& dir) {
  write_file(dir + "/plot.gp",
             "set datafile separator ','\n"
             "set key autotitle columnhead\n"
             "set terminal pngcairo size 1100,750\n"
             "set output 'fronts.png'\n"
             "set xlabel 't'\n"
             "plot 'series.csv' using 1:2 with lines title 'g', \\\n"
             "     'series.csv' using 1:3 with lines title 'h'\n"
             "set output 'final_state.png'\n"
             "set xlabel 'x'\n"
             "plot 'final_state.csv' using 1:2 with lines title 'u'\n");
}

int cmd_simulate(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  sim_config cfg = build_sim(rc, k, f);
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);
  std::string series_path = dir + "/series.csv";
  std::string ckpt_path = dir + "/checkpoint.txt";
  std::uint64_t fp = config_fingerprint(rc);

  // The CSV is kept whole in memory and rewritten atomically at every
  // checkpoint, so a resumed run appends to a consistent prefix and the
  // final file is byte-identical to an uninterrupted run.
  std::string csv;
  if (!opt.resume_path.empty() && std::filesystem::exists(series_path))
    csv = read_file(series_path);
  else
    csv = std::string(time_series::header()) + "\n";
  std::string pending;
  cfg.on_record = [&](const front_state& st) {
    series_row r{st.t,       st.g,
                 st.h,       st.sup(),
                 st.mass(),  right_flux(st, k, cfg.mu),
                 left_flux(st, k, cfg.mu)};
    pending += csv_row(r);
  };
  if (cfg.checkpoint_every > 0.0) {
    cfg.on_checkpoint = [&](const front_state& st, std::uint64_t steps,
                            double next_rec, double span) {
      csv += pending;
      pending.clear();
      write_file_atomic(series_path, csv);
      save_checkpoint(ckpt_path, checkpoint_data{fp, st, steps, next_rec, span});
    };
  }

  run_result res;
  if (!opt.resume_path.empty()) {
    checkpoint_data cp = load_checkpoint(opt.resume_path);
    if (cp.fingerprint != fp)
      fail(errc::config_drift, "checkpoint fingerprint " + hex16(cp.fingerprint) +
                                   " does not match this configuration (" + hex16(fp) +
                                   "); only T_max_time may change across a resume");
    res = run_from(cfg, cp.state, cp.steps, cp.next_record, cp.aux_span);
  } else {
    res = run(cfg);
  }
  csv += pending;
  write_file_atomic(series_path, csv);

  std::string fs = "x,u\n";
  for (std::size_t i = 0; i < res.final_state.x.size(); ++i)
    fs += format_g(res.final_state.x[i]) + "," + format_g(res.final_state.u[i]) + "\n";
  write_file(dir + "/final_state.csv", fs);
  if (opt.emit_plotscript) write_sim_plotscript(dir);

  std::string oc = "n/a";
  try {
    double ell = ell_star(k, cfg.d, f.f0());
    oc = outcome_name(classify_outcome(res.series, ell));
  } catch (const error&) {
    // No threshold length for this kernel/rates; leave the outcome open.
  }
  const front_state& st = res.final_state;
  std::printf("simulate t=%s g=%s h=%s sup_u=%s outcome=%s dir=%s\n",
              format_g(st.t).c_str(), format_g(st.g).c_str(), format_g(st.h).c_str(),
              format_g(st.sup()).c_str(), oc.c_str(), dir.c_str());
  return 0;
}

int cmd_eigen(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  double f0 = f.f0();
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);

  std::string csv = "l,n,lambda_p,residual,iterations\n";
  std::mt19937_64 rng(rc.output.seed);
  double max_dev = 0.0;
  double last_lambda = 0.0;
  for (double l : rc.eigen.l_values) {
    int n = rc.eigen.n_nodes > 0
                ? rc.eigen.n_nodes
                : std::clamp(static_cast<int>(std::lround(32.0 * l)) + 1, 129, 4097);
    eigen_result er =
        principal_eigenvalue(assemble(k, rc.sim.d, rc.eigen.c_drift, f0, {-l, l}, n));
    csv += format_g(l) + "," + std::to_string(n) + "," + format_g(er.lambda_p) + "," +
           format_g(er.residual) + "," + std::to_string(er.iterations) + "\n";
    last_lambda = er.lambda_p;
    for (int t = 0; t < rc.eigen.translations; ++t) {
      double tau = draw_uniform(rng, -5.0 * l, 5.0 * l);
      eigen_result et = principal_eigenvalue(
          assemble(k, rc.sim.d, rc.eigen.c_drift, f0, {-l + tau, l + tau}, n));
      max_dev = std::max(max_dev, std::abs(et.lambda_p - er.lambda_p));
    }
  }
  write_file(dir + "/eigen.csv", csv);
  if (opt.emit_plotscript)
    write_file(dir + "/plot.gp",
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set terminal pngcairo size 1100,750\n"
               "set output 'eigen.png'\n"
               "set xlabel 'l'\n"
               "set logscale x\n"
               "plot 'eigen.csv' using 1:3 with linespoints title 'lambda_p'\n");
  if (rc.eigen.translations > 0)
    std::printf("eigen lengths=%zu last_lambda_p=%s max_translation_dev=%s dir=%s\n",
                rc.eigen.l_values.size(), format_g(last_lambda).c_str(),
                format_g(max_dev).c_str(), dir.c_str());
  else
    std::printf("eigen lengths=%zu last_lambda_p=%s dir=%s\n", rc.eigen.l_values.size(),
                format_g(last_lambda).c_str(), dir.c_str());
  return 0;
}

int cmd_ell_star(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  double ell = ell_star(k, rc.sim.d, f.f0());
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);
  write_file(dir + "/result.txt", "ell_star = " + format_g(ell) + "\n");
  std::printf("ell-star value=%s d=%s f0=%s dir=%s\n", format_g(ell).c_str(),
              format_g(rc.sim.d).c_str(), format_g(f.f0()).c_str(), dir.c_str());
  return 0;
}

int cmd_mu_star(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  double ell = ell_star(k, rc.sim.d, f.f0());
  sim_config tmpl = build_sim(rc, k, f);
  double mu = mu_star(tmpl, ell, rc.mu_star.mu_lo, rc.mu_star.mu_hi, rc.mu_star.rel_tol);
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);
  write_file(dir + "/result.txt", "mu_star = " + format_g(mu) + "\nell_star = " +
                                      format_g(ell) + "\n");
  std::printf("mu-star value=%s ell_star=%s rel_tol=%s dir=%s\n", format_g(mu).c_str(),
              format_g(ell).c_str(), format_g(rc.mu_star.rel_tol).c_str(), dir.c_str());
  return 0;
}

int cmd_semiwave(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  double d = rc.sim.d;
  double mu = rc.sim.mu;
  std::vector<double> deltas = delta_ladder(rc.semiwave.delta_floor);
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);

  std::vector<std::string> profile_files;
  if (!rc.semiwave.c_values.empty()) {
    std::string result;
    std::string summary = "semiwave";
    for (std::size_t i = 0; i < rc.semiwave.c_values.size(); ++i) {
      double c = rc.semiwave.c_values[i];
      wave_profile w = extract_wave(c, k, f, d, deltas, rc.semiwave.x_depth,
                                    rc.semiwave.n_nodes);
      std::string fname = "profile_" + std::to_string(i) + ".csv";
      write_file(dir + "/" + fname, profile_csv(w.x, w.phi));
      profile_files.push_back(fname);
      double res = residual(w, k, f, d);
      result += "c = " + format_g(c) + "\nkind = " + wave_kind_name(w.kind) +
                "\nanchor = " + format_g(w.front_anchor) + "\nresidual = " +
                format_g(res) + "\n";
      summary += " c=" + format_g(c) + ":" + wave_kind_name(w.kind);
      if (w.kind == wave_kind::semi_wave) {
        double m = m_of_c(w, k, mu);
        result += "m = " + format_g(m) + "\n";
        summary += ":m=" + format_g(m);
      }
      result += "\n";
    }
    write_file(dir + "/result.txt", result);
    std::printf("%s dir=%s\n", summary.c_str(), dir.c_str());
  } else {
    speed_solve ss = find_c0(k, f, d, mu, rc.semiwave.tol);
    std::string bracket = "c,p\n";
    for (const auto& [c, p] : ss.bracket_history)
      bracket += format_g(c) + "," + format_g(p) + "\n";
    write_file(dir + "/bracket.csv", bracket);
    wave_profile w = extract_wave(ss.c0, k, f, d, deltas, rc.semiwave.x_depth,
                                  rc.semiwave.n_nodes);
    write_file(dir + "/profile.csv", profile_csv(w.x, w.phi));
    profile_files.push_back("profile.csv");
    write_file(dir + "/result.txt", "c0 = " + format_g(ss.c0) + "\nm_at_c0 = " +
                                        format_g(ss.m_at_c0) + "\nresidual = " +
                                        format_g(ss.residual) + "\n");
    std::printf("semiwave c0=%s m=%s residual=%s probes=%zu dir=%s\n",
                format_g(ss.c0).c_str(), format_g(ss.m_at_c0).c_str(),
                format_g(ss.residual).c_str(), ss.bracket_history.size(), dir.c_str());
  }
  if (opt.emit_plotscript) {
    std::string gp =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set terminal pngcairo size 1100,750\n"
        "set output 'profiles.png'\n"
        "set xlabel 'x'\n"
        "plot ";
    for (std::size_t i = 0; i < profile_files.size(); ++i) {
      if (i) gp += ", ";
      gp += "'" + profile_files[i] + "' using 1:2 with lines";
    }
    gp += "\n";
    write_file(dir + "/plot.gp", gp);
  }
  return 0;
}

int cmd_speed(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  sim_config cfg = build_sim(rc, k, f);
  run_result res = run(cfg);
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);
  std::string csv = std::string(time_series::header()) + "\n";
  for (const auto& r : res.series.rows) csv += csv_row(r);
  write_file(dir + "/series.csv", csv);

  speed_fit right = estimate_speed(res.series, rc.speed.window_frac, direction::right);
  speed_fit left = estimate_speed(res.series, rc.speed.window_frac, direction::left);
  std::string result =
      "right_slope = " + format_g(right.speed) + "\nright_stderr = " +
      format_g(right.stderr_speed) + "\nleft_slope = " + format_g(left.speed) +
      "\nleft_stderr = " + format_g(left.stderr_speed) + "\nwindow = [" +
      format_g(right.t_lo) + ", " + format_g(right.t_hi) + "]\n";
  std::string summary = "speed right=" + format_g(right.speed) +
                        " left=" + format_g(left.speed);
  if (rc.speed.use_theory) {
    speed_solve cr = find_c0(k, f, cfg.d, cfg.mu, rc.semiwave.tol);
    speed_solve cl = find_c0_left(k, f, cfg.d, cfg.mu, rc.semiwave.tol);
    double rel_r = std::abs(right.speed - cr.c0) / cr.c0;
    double rel_l = std::abs(left.speed - cl.c0) / cl.c0;
    result += "c0_right = " + format_g(cr.c0) + "\nc0_left = " + format_g(cl.c0) +
              "\nrel_err_right = " + format_g(rel_r) + "\nrel_err_left = " +
              format_g(rel_l) + "\n";
    summary += " c0_right=" + format_g(cr.c0) + " rel_err_right=" + format_g(rel_r);
  }
  write_file(dir + "/result.txt", result);
  std::printf("%s dir=%s\n", summary.c_str(), dir.c_str());
  return 0;
}

int cmd_accelerate(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  sim_config cfg = build_sim(rc, k, f);
  run_result res = run(cfg);
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);
  std::string csv = std::string(time_series::header()) + "\n";
  for (const auto& r : res.series.rows) csv += csv_row(r);
  write_file(dir + "/series.csv", csv);

  accel_fit fit = fit_acceleration(res.series, rc.accelerate.model,
                                   rc.accelerate.window_frac, rc.accelerate.beta);
  write_file(dir + "/result.txt",
             std::string("model = ") + accel_model_name(fit.model) + "\nexponent = " +
                 format_g(fit.exponent) + "\ncoefficient = " + format_g(fit.coefficient) +
                 "\nr2 = " + format_g(fit.r2) + "\nn_points = " +
                 std::to_string(fit.n_points) + "\n");
  if (opt.emit_plotscript)
    write_file(dir + "/plot.gp",
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set terminal pngcairo size 1100,750\n"
               "set output 'growth.png'\n"
               "set logscale xy\n"
               "set xlabel 't'\n"
               "plot 'series.csv' using 1:3 with lines title 'h'\n");
  std::printf("accelerate model=%s exponent=%s coefficient=%s r2=%s dir=%s\n",
              accel_model_name(fit.model), format_g(fit.exponent).c_str(),
              format_g(fit.coefficient).c_str(), format_g(fit.r2).c_str(), dir.c_str());
  return 0;
}

int cmd_harness(const cli_options& opt) {
  run_config rc = load_config(opt.config_path);
  kernel k = build_kernel(rc);
  reaction f = build_reaction(rc);
  sim_config base = build_sim(rc, k, f);
  comparison_report rep = comparison_harness(base, rc.harness.n_pairs, rc.output.seed);
  std::string dir = run_dir(rc, opt);
  write_manifest(dir, rc, opt);
  std::string report;
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const pair_outcome& po = rep.pairs[i];
    report += "pair " + std::to_string(i) + " amp=[" + format_g(po.amp_lo) + ", " +
              format_g(po.amp_hi) + "] mu=[" + format_g(po.mu_lo) + ", " +
              format_g(po.mu_hi) + "] records=" + std::to_string(po.records_compared) +
              " violations=" + std::to_string(po.violations.size()) + "\n";
    for (const auto& v : po.violations) report += "  " + v + "\n";
  }
  report += "total_violations = " + std::to_string(rep.total_violations) + "\n";
  write_file(dir + "/report.txt", report);
  std::printf("harness pairs=%zu violations=%d dir=%s\n", rep.pairs.size(),
              rep.total_violations, dir.c_str());
  return 0;
}

void report_error(const error& e) {
  std::string msg = e.what();
  std::string prefix = std::string(errc_name(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  std::string esc;
  for (char ch : msg) {
    if (ch == '"' || ch == '\\') esc += '\\';
    esc += ch;
  }
  std::fprintf(stderr, "NLFRONT_ERROR code=%d name=%s msg=\"%s\"\n",
               exit_code_for(e.code()), errc_name(e.code()), esc.c_str());
}

}  // namespace

int dispatch(const cli_options& opt) {
  try {
    if (opt.subcommand == "validate") return cmd_validate(opt);
    if (opt.subcommand == "simulate") return cmd_simulate(opt);
    if (opt.subcommand == "eigen") return cmd_eigen(opt);
    if (opt.subcommand == "ell-star") return cmd_ell_star(opt);
    if (opt.subcommand == "mu-star") return cmd_mu_star(opt);
    if (opt.subcommand == "semiwave") return cmd_semiwave(opt);
    if (opt.subcommand == "speed") return cmd_speed(opt);
    if (opt.subcommand == "accelerate") return cmd_accelerate(opt);
    if (opt.subcommand == "harness") return cmd_harness(opt);
    fail(errc::invalid_parameter, "unknown subcommand \"" + opt.subcommand + "\"");
  } catch (const error& e) {
    report_error(e);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::string esc;
    for (const char* p = e.what(); *p; ++p) {
      if (*p == '"' || *p == '\\') esc += '\\';
      esc += *p;
    }
    std::fprintf(stderr, "NLFRONT_ERROR code=%d name=Internal msg=\"%s\"\n",
                 exit_code_for(errc::io_failure), esc.c_str());
    return exit_code_for(errc::io_failure);
  }
}

}  // namespace nlfront
