#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nlfront/kernels.hpp"
#include "nlfront/reactions.hpp"

namespace nlfront {

// Discrete state of the moving-domain problem. The end nodes sit exactly on
// the fronts and always carry u = 0; interior nodes live strictly inside
// (g, h) — on integer multiples of dx for uniform meshes, on a two-zone
// graded mesh otherwise. Quadrature uses nonuniform trapezoid weights, so the
// fractional cells next to each front are handled exactly.
struct front_state {
  double t = 0.0;
  double g = -1.0;
  double h = 1.0;
  double dx = 0.0;  // lattice pitch for uniform meshes; 0 on graded meshes
  std::vector<double> x;  // g = x[0] < x[1] < ... < x[m] = h
  std::vector<double> u;  // u[0] == u[m] == 0, all entries >= 0

  double span() const { return h - g; }
  double sup() const;
  double mass() const;  // trapezoid integral of u over (g, h)
};

enum class mesh_kind { uniform, graded };

struct sim_config {
  kernel k;
  reaction f;
  double d = 1.0;
  double mu = 1.0;
  double h0 = 1.0;
  std::function<double(double)> u0{};  // initial profile on [-h0, h0]
  double dx = 0.05;
  double dt = 0.01;
  double t_max = 100.0;
  int picard_iters = 0;
  double record_every = 1.0;
  mesh_kind mesh = mesh_kind::uniform;
  // Stop once h reaches this height (acceleration runs); +inf disables.
  double stop_at_h = std::numeric_limits<double>::infinity();
  // When finite, run() classifies at every record and stops on a decisive
  // outcome instead of integrating all the way to t_max.
  double ell_star_hint = std::numeric_limits<double>::quiet_NaN();
  // A priori sup bound, max(sup u0, K0); run() fills it when left at 0.
  double u_bound = 0.0;
  // Optional capture hook, called with every recorded state (including the
  // initial and final states).
  std::function<void(const front_state&)> on_record{};
  // Periodic checkpoint hook: (state, steps taken, next record time, graded
  // bookkeeping span). Fires every checkpoint_every time units when positive.
  double checkpoint_every = 0.0;
  std::function<void(const front_state&, std::uint64_t, double, double)> on_checkpoint{};
};

struct series_row {
  double t = 0.0;
  double g = 0.0;
  double h = 0.0;
  double sup_u = 0.0;
  double mass = 0.0;
  double right_flux = 0.0;
  double left_flux = 0.0;
};

struct time_series {
  std::vector<series_row> rows;
  static const char* header() { return "t,g,h,sup_u,mass,right_flux,left_flux"; }
};

// mu * integral over (g, h) of K(h - x) u(x) dx: mass currently being thrown
// past the right front. left_flux is the mirror image (mass past g), also
// returned as a magnitude.
double right_flux(const front_state& st, const kernel& k, double mu);
double left_flux(const front_state& st, const kernel& k, double mu);

// One explicit Euler step (plus optional fixed-point sweeps of the implicit
// trapezoid corrector) of the density, then the front ODEs, then lattice
// bookkeeping. jmat, when given, must hold J(x_i - x_j) row-major for the
// current node set (graded-mesh runs cache it between rebuilds).
front_state step(const front_state& st, const sim_config& cfg,
                 const std::vector<double>* jmat = nullptr);

struct run_result {
  time_series series;
  front_state final_state;
};

run_result run(const sim_config& cfg);
// Continuation entry point used by checkpoint resume: starts from an exact
// state with `steps_done` steps already taken and the next record due at
// `next_record`. last_rebuild_span carries graded-mesh bookkeeping (0 for
// uniform meshes).
run_result run_from(const sim_config& cfg, front_state st, std::uint64_t steps_done,
                    double next_record, double last_rebuild_span = 0.0);

enum class outcome { spreading, vanishing, undecided };
const char* outcome_name(outcome o);

struct classify_thresholds {
  double eps_vanish = 1e-4;      // sup below this counts as extinct
  double margin_frac = 0.05;     // dead zone around ell_star, fraction of it
  double growth_tol = 1e-6;      // trailing relative span growth for vanishing
  double trailing_frac = 0.10;   // fraction of the horizon used for the growth check
};

outcome classify_outcome(const time_series& series, double ell_star_value,
                         const classify_thresholds& th = {});

// Threshold dispersal coefficient: bisection on mu between a vanishing and a
// spreading probe. The template's mu is overwritten per probe; undecided
// probes double t_max up to 8x before giving up.
double mu_star(const sim_config& cfg_template, double ell_star_value, double mu_lo,
               double mu_hi, double rel_tol);

}  // namespace nlfront
