#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlfront/experiments.hpp"
#include "nlfront/free_boundary.hpp"
#include "nlfront/kernels.hpp"
#include "nlfront/reactions.hpp"

namespace nlfront {

// Raw INI-style document: ordered sections of ordered key = value pairs, all
// values kept verbatim. serialize_config(parse_config(text)) reproduces a
// canonically formatted document byte for byte.
struct raw_entry {
  std::string key;
  std::string value;
};

struct raw_section {
  std::string name;
  std::vector<raw_entry> entries;
};

struct raw_config {
  std::vector<raw_section> sections;
  const raw_section* find(const std::string& name) const;
};

// Full-line comments start with '#' or ';'. Duplicate sections or keys,
// malformed headers and keys outside a section raise ParseError with the
// offending line number.
raw_config parse_config(const std::string& text);
std::string serialize_config(const raw_config& rc);

enum class u0_kind { cosine, parabolic };
const char* u0_kind_name(u0_kind k);
const char* mesh_kind_name(mesh_kind m);

struct sim_settings {
  double d = 1.0;
  double mu = 1.0;
  double h0 = 1.0;
  double dx = 0.05;
  double dt = 0.01;
  double t_max = 100.0;
  double record_every = 1.0;
  int picard_iters = 0;
  u0_kind u0_profile = u0_kind::cosine;
  double u0_amplitude = 0.5;
  mesh_kind mesh = mesh_kind::uniform;
  double stop_at_h = 0.0;        // 0 disables the height stop
  double checkpoint_every = 0.0;  // 0 disables checkpointing
};

struct eigen_settings {
  std::vector<double> l_values = {1.0, 2.0, 4.0, 8.0, 16.0};
  int n_nodes = 0;  // 0 picks the node count from the length
  double c_drift = 0.0;
  int translations = 0;  // randomized translation-invariance checks per length
};

struct semiwave_settings {
  std::vector<double> c_values;  // empty: solve for the selected speed instead
  double x_depth = 16.0;
  int n_nodes = 2048;
  double delta_floor = 1e-4;
  double tol = 1e-3;
};

struct mu_star_settings {
  double mu_lo = 1e-3;
  double mu_hi = 1.0;
  double rel_tol = 0.05;
};

struct accel_settings {
  accel_model model = accel_model::power_law;
  double window_frac = 0.5;
  double beta = 2.0;
};

struct speed_settings {
  double window_frac = 0.5;
  bool use_theory = true;  // also report the selected speed for comparison
};

struct harness_settings {
  int n_pairs = 20;
};

struct output_settings {
  std::string outdir = "out";
  std::uint64_t seed = 20260814;
};

// Typed view of a document with every field resolved to a value (defaults
// fill anything omitted; an empty document is fully valid).
struct run_config {
  kernel_spec kernel_params;
  reaction_spec reaction_params;
  std::string kernel_table_path;
  std::string reaction_table_path;
  sim_settings sim;
  eigen_settings eigen;
  semiwave_settings semiwave;
  mu_star_settings mu_star;
  accel_settings accelerate;
  speed_settings speed;
  harness_settings harness;
  output_settings output;
};

// Applies the document onto the defaults and checks every constraint,
// collecting all violations (unknown sections/keys, malformed values, range
// breaches, table files that fail to load) into a single ValidationError.
run_config resolve_config(const raw_config& raw);

run_config default_config();

// Canonical document listing every section and key with resolved values.
raw_config to_raw(const run_config& rc);

// Hash of the physics-relevant resolved values (kernel, reaction, the [sim]
// block minus T_max_time). Checkpoints embed it so a resume under a
// different physics raises ConfigDrift; extending T_max_time is allowed.
std::uint64_t config_fingerprint(const run_config& rc);

kernel build_kernel(const run_config& rc);
reaction build_reaction(const run_config& rc);
sim_config build_sim(const run_config& rc, const kernel& k, const reaction& f);

std::function<double(double)> initial_profile(u0_kind profile, double amplitude,
                                              double h0);

}  // namespace nlfront
