#include "nlfront/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "nlfront/errors.hpp"
#include "nlfront/io.hpp"

namespace nlfront {

const raw_section* raw_config::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

raw_config parse_config(const std::string& text) {
  raw_config rc;
  raw_section* cur = nullptr;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto bad_line = [&](const std::string& what) {
    fail(errc::parse_error, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') bad_line("unterminated section header \"" + t + "\"");
      std::string name = trim(t.substr(1, t.size() - 2));
      if (name.empty()) bad_line("empty section name");
      for (const auto& s : rc.sections)
        if (s.name == name) bad_line("duplicate section [" + name + "]");
      rc.sections.push_back({name, {}});
      cur = &rc.sections.back();
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) bad_line("expected key = value, got \"" + t + "\"");
    if (cur == nullptr) bad_line("key outside any section");
    raw_entry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1))};
    if (e.key.empty()) bad_line("empty key");
    for (const auto& prev : cur->entries)
      if (prev.key == e.key) bad_line("duplicate key \"" + e.key + "\" in [" + cur->name + "]");
    cur->entries.push_back(std::move(e));
  }
  return rc;
}

std::string serialize_config(const raw_config& rc) {
  std::string out;
  for (const auto& s : rc.sections) {
    out += '[';
    out += s.name;
    out += "]\n";
    for (const auto& e : s.entries) {
      out += e.key;
      out += " = ";
      out += e.value;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

const char* u0_kind_name(u0_kind k) {
  return k == u0_kind::cosine ? "cosine" : "parabolic";
}

const char* mesh_kind_name(mesh_kind m) {
  return m == mesh_kind::uniform ? "uniform" : "graded";
}

namespace {

struct value_reader {
  std::vector<std::string>* bad;
  std::string section;

  void note(const std::string& key, const std::string& what) const {
    bad->push_back("[" + section + "] " + key + ": " + what);
  }
  bool number(const raw_entry& e, double& dst) const {
    const char* s = e.value.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      note(e.key, "expected a finite number, got \"" + e.value + "\"");
      return false;
    }
    dst = v;
    return true;
  }
  bool integer(const raw_entry& e, int& dst) const {
    const char* s = e.value.c_str();
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || errno == ERANGE || v < -1000000000L || v > 1000000000L) {
      note(e.key, "expected an integer, got \"" + e.value + "\"");
      return false;
    }
    dst = static_cast<int>(v);
    return true;
  }
  bool unsigned64(const raw_entry& e, std::uint64_t& dst) const {
    const char* s = e.value.c_str();
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0' || errno == ERANGE || e.value.find('-') != std::string::npos) {
      note(e.key, "expected an unsigned integer, got \"" + e.value + "\"");
      return false;
    }
    dst = static_cast<std::uint64_t>(v);
    return true;
  }
  bool boolean(const raw_entry& e, bool& dst) const {
    std::string v = to_lower(e.value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
      dst = true;
      return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
      dst = false;
      return true;
    }
    note(e.key, "expected a boolean, got \"" + e.value + "\"");
    return false;
  }
  bool list(const raw_entry& e, std::vector<double>& dst) const {
    std::vector<double> vals;
    for (const auto& piece : split(e.value, ',')) {
      std::string p = trim(piece);
      const char* s = p.c_str();
      char* end = nullptr;
      errno = 0;
      double v = std::strtod(s, &end);
      if (p.empty() || end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        note(e.key, "expected a comma-separated number list, got \"" + e.value + "\"");
        return false;
      }
      vals.push_back(v);
    }
    if (vals.empty()) {
      note(e.key, "empty list");
      return false;
    }
    dst = std::move(vals);
    return true;
  }
};

bool kernel_family_from(const std::string& s, kernel_family& out) {
  static const std::pair<const char*, kernel_family> table[] = {
      {"uniform", kernel_family::uniform},       {"triangular", kernel_family::triangular},
      {"gaussian", kernel_family::gaussian},     {"laplace", kernel_family::laplace},
      {"compact_bump", kernel_family::compact_bump},
      {"power_tail", kernel_family::power_tail}, {"log_tail", kernel_family::log_tail},
      {"tabulated", kernel_family::tabulated},
  };
  for (const auto& [name, fam] : table)
    if (s == name) {
      out = fam;
      return true;
    }
  return false;
}

bool reaction_family_from(const std::string& s, reaction_family& out) {
  if (s == "logistic") out = reaction_family::logistic;
  else if (s == "cubic_kpp") out = reaction_family::cubic_kpp;
  else if (s == "tabulated") out = reaction_family::tabulated;
  else return false;
  return true;
}

bool accel_model_from(const std::string& s, accel_model& out) {
  if (s == "power") out = accel_model::power_law;
  else if (s == "t_log") out = accel_model::t_log;
  else if (s == "exp_root") out = accel_model::exp_root;
  else return false;
  return true;
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_g(v[i]);
  }
  return out;
}

}  // namespace

run_config default_config() { return run_config{}; }

run_config resolve_config(const raw_config& raw) {
  run_config rc;
  std::vector<std::string> bad;

  for (const auto& sec : raw.sections) {
    value_reader rd{&bad, sec.name};
    if (sec.name == "kernel") {
      for (const auto& e : sec.entries) {
        if (e.key == "family") {
          if (!kernel_family_from(e.value, rc.kernel_params.family))
            rd.note(e.key, "unknown kernel family \"" + e.value + "\"");
        } else if (e.key == "a_length") rd.number(e, rc.kernel_params.a);
        else if (e.key == "s_length") rd.number(e, rc.kernel_params.s);
        else if (e.key == "b_length") rd.number(e, rc.kernel_params.b);
        else if (e.key == "alpha") rd.number(e, rc.kernel_params.alpha);
        else if (e.key == "beta") rd.number(e, rc.kernel_params.beta);
        else if (e.key == "lambda") rd.number(e, rc.kernel_params.lambda);
        else if (e.key == "shift_length") rd.number(e, rc.kernel_params.shift);
        else if (e.key == "table_path") rc.kernel_table_path = e.value;
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "reaction") {
      for (const auto& e : sec.entries) {
        if (e.key == "family") {
          if (!reaction_family_from(e.value, rc.reaction_params.family))
            rd.note(e.key, "unknown reaction family \"" + e.value + "\"");
        } else if (e.key == "r_rate") rd.number(e, rc.reaction_params.r);
        else if (e.key == "b_shape") rd.number(e, rc.reaction_params.b);
        else if (e.key == "table_path") rc.reaction_table_path = e.value;
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "sim") {
      for (const auto& e : sec.entries) {
        if (e.key == "d_rate") rd.number(e, rc.sim.d);
        else if (e.key == "mu_rate") rd.number(e, rc.sim.mu);
        else if (e.key == "h0_length") rd.number(e, rc.sim.h0);
        else if (e.key == "dx_length") rd.number(e, rc.sim.dx);
        else if (e.key == "dt_time") rd.number(e, rc.sim.dt);
        else if (e.key == "T_max_time") rd.number(e, rc.sim.t_max);
        else if (e.key == "record_every_time") rd.number(e, rc.sim.record_every);
        else if (e.key == "picard_iters") rd.integer(e, rc.sim.picard_iters);
        else if (e.key == "u0_profile") {
          if (e.value == "cosine") rc.sim.u0_profile = u0_kind::cosine;
          else if (e.value == "parabolic") rc.sim.u0_profile = u0_kind::parabolic;
          else rd.note(e.key, "expected cosine or parabolic, got \"" + e.value + "\"");
        } else if (e.key == "u0_amplitude") rd.number(e, rc.sim.u0_amplitude);
        else if (e.key == "mesh") {
          if (e.value == "uniform") rc.sim.mesh = mesh_kind::uniform;
          else if (e.value == "graded") rc.sim.mesh = mesh_kind::graded;
          else rd.note(e.key, "expected uniform or graded, got \"" + e.value + "\"");
        } else if (e.key == "stop_at_h_length") rd.number(e, rc.sim.stop_at_h);
        else if (e.key == "checkpoint_every_time") rd.number(e, rc.sim.checkpoint_every);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "eigen") {
      for (const auto& e : sec.entries) {
        if (e.key == "l_list") rd.list(e, rc.eigen.l_values);
        else if (e.key == "n_nodes") rd.integer(e, rc.eigen.n_nodes);
        else if (e.key == "c_drift_speed") rd.number(e, rc.eigen.c_drift);
        else if (e.key == "translations") rd.integer(e, rc.eigen.translations);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "semiwave") {
      for (const auto& e : sec.entries) {
        if (e.key == "c_list") rd.list(e, rc.semiwave.c_values);
        else if (e.key == "X_depth_length") rd.number(e, rc.semiwave.x_depth);
        else if (e.key == "n_nodes") rd.integer(e, rc.semiwave.n_nodes);
        else if (e.key == "delta_floor") rd.number(e, rc.semiwave.delta_floor);
        else if (e.key == "tol") rd.number(e, rc.semiwave.tol);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "mu_star") {
      for (const auto& e : sec.entries) {
        if (e.key == "mu_lo_rate") rd.number(e, rc.mu_star.mu_lo);
        else if (e.key == "mu_hi_rate") rd.number(e, rc.mu_star.mu_hi);
        else if (e.key == "rel_tol") rd.number(e, rc.mu_star.rel_tol);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "accelerate") {
      for (const auto& e : sec.entries) {
        if (e.key == "model") {
          if (!accel_model_from(e.value, rc.accelerate.model))
            rd.note(e.key, "expected power, t_log or exp_root, got \"" + e.value + "\"");
        } else if (e.key == "window_frac") rd.number(e, rc.accelerate.window_frac);
        else if (e.key == "beta") rd.number(e, rc.accelerate.beta);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "speed") {
      for (const auto& e : sec.entries) {
        if (e.key == "window_frac") rd.number(e, rc.speed.window_frac);
        else if (e.key == "use_theory") rd.boolean(e, rc.speed.use_theory);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "harness") {
      for (const auto& e : sec.entries) {
        if (e.key == "n_pairs") rd.integer(e, rc.harness.n_pairs);
        else rd.note(e.key, "unknown key");
      }
    } else if (sec.name == "output") {
      for (const auto& e : sec.entries) {
        if (e.key == "outdir") rc.output.outdir = e.value;
        else if (e.key == "seed") rd.unsigned64(e, rc.output.seed);
        else rd.note(e.key, "unknown key");
      }
    } else {
      bad.push_back("[" + sec.name + "]: unknown section");
    }
  }

  auto note = [&](const std::string& sec, const std::string& key, const std::string& what) {
    bad.push_back("[" + sec + "] " + key + ": " + what);
  };

  // Kernel constraints (checked by name before construction so the report
  // points at the exact key).
  std::size_t kernel_mark = bad.size();
  {
    kernel_spec& ks = rc.kernel_params;
    switch (ks.family) {
      case kernel_family::uniform:
      case kernel_family::triangular:
      case kernel_family::compact_bump:
        if (!(ks.a > 0.0)) note("kernel", "a_length", "half-width must be positive");
        break;
      case kernel_family::gaussian:
        if (!(ks.s > 0.0)) note("kernel", "s_length", "standard deviation must be positive");
        break;
      case kernel_family::laplace:
        if (!(ks.b > 0.0)) note("kernel", "b_length", "scale must be positive");
        break;
      case kernel_family::power_tail:
        if (!(ks.alpha > 1.0))
          note("kernel", "alpha", "algebraic-tail exponent must exceed 1 for unit mass");
        if (!(ks.lambda > 0.0)) note("kernel", "lambda", "tail constant must be positive");
        break;
      case kernel_family::log_tail:
        if (!(ks.beta > 1.0))
          note("kernel", "beta", "log-tail exponent must exceed 1 for unit mass");
        if (!(ks.lambda > 0.0)) note("kernel", "lambda", "tail constant must be positive");
        break;
      case kernel_family::tabulated:
        if (rc.kernel_table_path.empty() && ks.table_x.empty())
          note("kernel", "table_path", "tabulated kernel needs a table");
        break;
    }
    if (ks.family == kernel_family::tabulated && !rc.kernel_table_path.empty()) {
      try {
        auto rows = read_two_column(rc.kernel_table_path);
        ks.table_x.clear();
        ks.table_j.clear();
        for (const auto& [x, j] : rows) {
          ks.table_x.push_back(x);
          ks.table_j.push_back(j);
        }
      } catch (const error& e) {
        note("kernel", "table_path", e.what());
      }
    }
  }
  bool kernel_clean = bad.size() == kernel_mark;

  std::size_t reaction_mark = bad.size();
  {
    reaction_spec& fs = rc.reaction_params;
    switch (fs.family) {
      case reaction_family::logistic:
        if (!(fs.r > 0.0)) note("reaction", "r_rate", "growth rate must be positive");
        break;
      case reaction_family::cubic_kpp:
        if (!(fs.r > 0.0)) note("reaction", "r_rate", "growth rate must be positive");
        if (!(fs.b >= 0.0 && fs.b <= 1.0))
          note("reaction", "b_shape", "shape must lie in [0, 1]");
        break;
      case reaction_family::tabulated:
        if (rc.reaction_table_path.empty() && fs.table_u.empty())
          note("reaction", "table_path", "tabulated reaction needs a table");
        break;
    }
    if (fs.family == reaction_family::tabulated && !rc.reaction_table_path.empty()) {
      try {
        auto rows = read_two_column(rc.reaction_table_path);
        fs.table_u.clear();
        fs.table_f.clear();
        for (const auto& [u, f] : rows) {
          fs.table_u.push_back(u);
          fs.table_f.push_back(f);
        }
      } catch (const error& e) {
        note("reaction", "table_path", e.what());
      }
    }
  }
  bool reaction_clean = bad.size() == reaction_mark;

  if (!(rc.sim.d > 0.0)) note("sim", "d_rate", "dispersal rate must be positive");
  if (!(rc.sim.mu > 0.0)) note("sim", "mu_rate", "front response must be positive");
  if (!(rc.sim.h0 > 0.0)) note("sim", "h0_length", "initial half-length must be positive");
  if (!(rc.sim.dx > 0.0)) note("sim", "dx_length", "grid pitch must be positive");
  if (!(rc.sim.dt > 0.0)) note("sim", "dt_time", "time step must be positive");
  if (!(rc.sim.t_max > 0.0)) note("sim", "T_max_time", "horizon must be positive");
  if (!(rc.sim.record_every > 0.0))
    note("sim", "record_every_time", "record cadence must be positive");
  if (rc.sim.picard_iters < 0) note("sim", "picard_iters", "must be nonnegative");
  if (!(rc.sim.u0_amplitude > 0.0)) note("sim", "u0_amplitude", "must be positive");
  if (!(rc.sim.stop_at_h >= 0.0)) note("sim", "stop_at_h_length", "must be nonnegative");
  if (!(rc.sim.checkpoint_every >= 0.0))
    note("sim", "checkpoint_every_time", "must be nonnegative");

  if (rc.eigen.l_values.empty()) note("eigen", "l_list", "need at least one length");
  for (double l : rc.eigen.l_values)
    if (!(l > 0.0)) {
      note("eigen", "l_list", "lengths must be positive");
      break;
    }
  if (rc.eigen.n_nodes != 0 && rc.eigen.n_nodes < 16)
    note("eigen", "n_nodes", "use 0 for automatic or at least 16");
  if (rc.eigen.translations < 0) note("eigen", "translations", "must be nonnegative");

  for (double c : rc.semiwave.c_values)
    if (!(c > 0.0)) {
      note("semiwave", "c_list", "speeds must be positive");
      break;
    }
  if (!(rc.semiwave.x_depth > 0.0)) note("semiwave", "X_depth_length", "must be positive");
  if (rc.semiwave.n_nodes < 16) note("semiwave", "n_nodes", "need at least 16 cells");
  if (!(rc.semiwave.delta_floor > 0.0 && rc.semiwave.delta_floor < 1.0))
    note("semiwave", "delta_floor", "must lie in (0, 1)");
  if (!(rc.semiwave.tol > 0.0)) note("semiwave", "tol", "must be positive");

  if (!(rc.mu_star.mu_lo > 0.0)) note("mu_star", "mu_lo_rate", "must be positive");
  if (!(rc.mu_star.mu_hi > rc.mu_star.mu_lo))
    note("mu_star", "mu_hi_rate", "must exceed mu_lo_rate");
  if (!(rc.mu_star.rel_tol > 0.0)) note("mu_star", "rel_tol", "must be positive");

  if (!(rc.accelerate.window_frac > 0.0 && rc.accelerate.window_frac < 1.0))
    note("accelerate", "window_frac", "must lie in (0, 1)");
  if (!(rc.accelerate.beta > 1.0)) note("accelerate", "beta", "must exceed 1");

  if (!(rc.speed.window_frac > 0.0 && rc.speed.window_frac < 1.0))
    note("speed", "window_frac", "must lie in (0, 1)");

  if (rc.harness.n_pairs < 1) note("harness", "n_pairs", "need at least one pair");

  if (rc.output.outdir.empty()) note("output", "outdir", "must not be empty");

  if (kernel_clean) {
    try {
      make_kernel(rc.kernel_params);
    } catch (const error& e) {
      bad.push_back(std::string("[kernel] ") + e.what());
    }
  }
  if (reaction_clean) {
    try {
      make_reaction(rc.reaction_params);
    } catch (const error& e) {
      bad.push_back(std::string("[reaction] ") + e.what());
    }
  }

  if (!bad.empty()) {
    std::string msg = std::to_string(bad.size()) + " problem(s): ";
    for (std::size_t i = 0; i < bad.size(); ++i) {
      if (i) msg += "; ";
      msg += bad[i];
    }
    fail(errc::validation_error, msg);
  }
  return rc;
}

raw_config to_raw(const run_config& rc) {
  raw_config out;
  auto& ks = rc.kernel_params;
  raw_section kernel_sec{"kernel", {}};
  kernel_sec.entries.push_back({"family", kernel_family_name(ks.family)});
  kernel_sec.entries.push_back({"a_length", format_g(ks.a)});
  kernel_sec.entries.push_back({"s_length", format_g(ks.s)});
  kernel_sec.entries.push_back({"b_length", format_g(ks.b)});
  kernel_sec.entries.push_back({"alpha", format_g(ks.alpha)});
  kernel_sec.entries.push_back({"beta", format_g(ks.beta)});
  kernel_sec.entries.push_back({"lambda", format_g(ks.lambda)});
  kernel_sec.entries.push_back({"shift_length", format_g(ks.shift)});
  if (!rc.kernel_table_path.empty())
    kernel_sec.entries.push_back({"table_path", rc.kernel_table_path});
  out.sections.push_back(std::move(kernel_sec));

  raw_section reaction_sec{"reaction", {}};
  reaction_sec.entries.push_back({"family", reaction_family_name(rc.reaction_params.family)});
  reaction_sec.entries.push_back({"r_rate", format_g(rc.reaction_params.r)});
  reaction_sec.entries.push_back({"b_shape", format_g(rc.reaction_params.b)});
  if (!rc.reaction_table_path.empty())
    reaction_sec.entries.push_back({"table_path", rc.reaction_table_path});
  out.sections.push_back(std::move(reaction_sec));

  raw_section sim_sec{"sim", {}};
  sim_sec.entries.push_back({"d_rate", format_g(rc.sim.d)});
  sim_sec.entries.push_back({"mu_rate", format_g(rc.sim.mu)});
  sim_sec.entries.push_back({"h0_length", format_g(rc.sim.h0)});
  sim_sec.entries.push_back({"dx_length", format_g(rc.sim.dx)});
  sim_sec.entries.push_back({"dt_time", format_g(rc.sim.dt)});
  sim_sec.entries.push_back({"T_max_time", format_g(rc.sim.t_max)});
  sim_sec.entries.push_back({"record_every_time", format_g(rc.sim.record_every)});
  sim_sec.entries.push_back({"picard_iters", std::to_string(rc.sim.picard_iters)});
  sim_sec.entries.push_back({"u0_profile", u0_kind_name(rc.sim.u0_profile)});
  sim_sec.entries.push_back({"u0_amplitude", format_g(rc.sim.u0_amplitude)});
  sim_sec.entries.push_back({"mesh", mesh_kind_name(rc.sim.mesh)});
  sim_sec.entries.push_back({"stop_at_h_length", format_g(rc.sim.stop_at_h)});
  sim_sec.entries.push_back({"checkpoint_every_time", format_g(rc.sim.checkpoint_every)});
  out.sections.push_back(std::move(sim_sec));

  raw_section eigen_sec{"eigen", {}};
  eigen_sec.entries.push_back({"l_list", join_list(rc.eigen.l_values)});
  eigen_sec.entries.push_back({"n_nodes", std::to_string(rc.eigen.n_nodes)});
  eigen_sec.entries.push_back({"c_drift_speed", format_g(rc.eigen.c_drift)});
  eigen_sec.entries.push_back({"translations", std::to_string(rc.eigen.translations)});
  out.sections.push_back(std::move(eigen_sec));

  raw_section semi_sec{"semiwave", {}};
  if (!rc.semiwave.c_values.empty())
    semi_sec.entries.push_back({"c_list", join_list(rc.semiwave.c_values)});
  semi_sec.entries.push_back({"X_depth_length", format_g(rc.semiwave.x_depth)});
  semi_sec.entries.push_back({"n_nodes", std::to_string(rc.semiwave.n_nodes)});
  semi_sec.entries.push_back({"delta_floor", format_g(rc.semiwave.delta_floor)});
  semi_sec.entries.push_back({"tol", format_g(rc.semiwave.tol)});
  out.sections.push_back(std::move(semi_sec));

  raw_section mu_sec{"mu_star", {}};
  mu_sec.entries.push_back({"mu_lo_rate", format_g(rc.mu_star.mu_lo)});
  mu_sec.entries.push_back({"mu_hi_rate", format_g(rc.mu_star.mu_hi)});
  mu_sec.entries.push_back({"rel_tol", format_g(rc.mu_star.rel_tol)});
  out.sections.push_back(std::move(mu_sec));

  raw_section acc_sec{"accelerate", {}};
  acc_sec.entries.push_back({"model", accel_model_name(rc.accelerate.model)});
  acc_sec.entries.push_back({"window_frac", format_g(rc.accelerate.window_frac)});
  acc_sec.entries.push_back({"beta", format_g(rc.accelerate.beta)});
  out.sections.push_back(std::move(acc_sec));

  raw_section speed_sec{"speed", {}};
  speed_sec.entries.push_back({"window_frac", format_g(rc.speed.window_frac)});
  speed_sec.entries.push_back({"use_theory", rc.speed.use_theory ? "true" : "false"});
  out.sections.push_back(std::move(speed_sec));

  raw_section harness_sec{"harness", {}};
  harness_sec.entries.push_back({"n_pairs", std::to_string(rc.harness.n_pairs)});
  out.sections.push_back(std::move(harness_sec));

  raw_section out_sec{"output", {}};
  out_sec.entries.push_back({"outdir", rc.output.outdir});
  out_sec.entries.push_back({"seed", std::to_string(rc.output.seed)});
  out.sections.push_back(std::move(out_sec));
  return out;
}

std::uint64_t config_fingerprint(const run_config& rc) {
  std::string s;
  auto add = [&](const char* key, double v) {
    s += key;
    s += '=';
    s += format_hex(v);
    s += '\n';
  };
  const kernel_spec& ks = rc.kernel_params;
  s += "kernel=";
  s += kernel_family_name(ks.family);
  s += '\n';
  add("a", ks.a);
  add("s", ks.s);
  add("b", ks.b);
  add("alpha", ks.alpha);
  add("beta", ks.beta);
  add("lambda", ks.lambda);
  add("shift", ks.shift);
  for (std::size_t i = 0; i < ks.table_x.size(); ++i) {
    add("tx", ks.table_x[i]);
    add("tj", ks.table_j[i]);
  }
  const reaction_spec& fs = rc.reaction_params;
  s += "reaction=";
  s += reaction_family_name(fs.family);
  s += '\n';
  add("r", fs.r);
  add("rb", fs.b);
  for (std::size_t i = 0; i < fs.table_u.size(); ++i) {
    add("tu", fs.table_u[i]);
    add("tf", fs.table_f[i]);
  }
  add("d", rc.sim.d);
  add("mu", rc.sim.mu);
  add("h0", rc.sim.h0);
  add("dx", rc.sim.dx);
  add("dt", rc.sim.dt);
  add("record_every", rc.sim.record_every);
  s += "picard=" + std::to_string(rc.sim.picard_iters) + "\n";
  s += std::string("u0=") + u0_kind_name(rc.sim.u0_profile) + "\n";
  add("amp", rc.sim.u0_amplitude);
  s += std::string("mesh=") + mesh_kind_name(rc.sim.mesh) + "\n";
  add("stop_at_h", rc.sim.stop_at_h);
  return fnv1a64(s);
}

kernel build_kernel(const run_config& rc) { return make_kernel(rc.kernel_params); }

reaction build_reaction(const run_config& rc) { return make_reaction(rc.reaction_params); }

std::function<double(double)> initial_profile(u0_kind profile, double amplitude,
                                              double h0) {
  if (!(amplitude > 0.0) || !(h0 > 0.0))
    fail(errc::invalid_parameter, "initial profile needs positive amplitude and h0");
  if (profile == u0_kind::cosine)
    return [amplitude, h0](double x) {
      double c = std::cos(0.5 * M_PI * x / h0);
      return amplitude * c * c;
    };
  return [amplitude, h0](double x) {
    double q = 1.0 - (x / h0) * (x / h0);
    return amplitude * std::max(q, 0.0);
  };
}

sim_config build_sim(const run_config& rc, const kernel& k, const reaction& f) {
  sim_config cfg;
  cfg.k = k;
  cfg.f = f;
  cfg.d = rc.sim.d;
  cfg.mu = rc.sim.mu;
  cfg.h0 = rc.sim.h0;
  cfg.u0 = initial_profile(rc.sim.u0_profile, rc.sim.u0_amplitude, rc.sim.h0);
  cfg.dx = rc.sim.dx;
  cfg.dt = rc.sim.dt;
  cfg.t_max = rc.sim.t_max;
  cfg.picard_iters = rc.sim.picard_iters;
  cfg.record_every = rc.sim.record_every;
  cfg.mesh = rc.sim.mesh;
  cfg.stop_at_h = rc.sim.stop_at_h > 0.0 ? rc.sim.stop_at_h
                                         : std::numeric_limits<double>::infinity();
  cfg.checkpoint_every = rc.sim.checkpoint_every;
  return cfg;
}

}  // namespace nlfront
