#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlfront/free_boundary.hpp"
#include "nlfront/kernels.hpp"

namespace nlfront {

// Least-squares front speed over a trailing window of the recorded series.
struct speed_fit {
  double speed = 0.0;  // slope of h (right) or of -g (left)
  double intercept = 0.0;
  double stderr_speed = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int n_points = 0;
};

speed_fit estimate_speed(const time_series& series, double window_frac, direction dir);

// Models for fronts that keep accelerating instead of settling on a slope:
//   power_law: ln h against ln t        (h ~ C t^p)
//   t_log:     trailing mean of h/(t ln t)
//   exp_root:  ln h against t^(1/beta)  (ln h ~ K t^(1/beta))
enum class accel_model { power_law, t_log, exp_root };

const char* accel_model_name(accel_model m);

struct accel_fit {
  accel_model model = accel_model::power_law;
  double exponent = 0.0;     // fitted power for power_law, 1/beta for exp_root
  double coefficient = 0.0;  // prefactor, trailing mean, or root-scale slope
  double r2 = 0.0;
  int n_points = 0;
};

// window_frac selects a trailing fraction of the horizon (capped at the
// second half); rows with t <= 1.5 are always dropped so the logarithms are
// well separated. beta is read only by the exp_root model.
accel_fit fit_acceleration(const time_series& series, accel_model model,
                           double window_frac = 0.5, double beta = 2.0);

// Ordered-pair stress test of the comparison structure: random ordered
// (amplitude, mu) pairs run on a shared lattice, and at every record the
// larger run must dominate the smaller one in u, h and -g, while both runs
// stay nonnegative and below the a priori bound. Any breach becomes a report
// entry; an empty report is the pass condition.
struct pair_outcome {
  double amp_lo = 0.0, amp_hi = 0.0;
  double mu_lo = 0.0, mu_hi = 0.0;
  int records_compared = 0;
  std::vector<std::string> violations;
};

struct comparison_report {
  std::vector<pair_outcome> pairs;
  int total_violations = 0;
};

comparison_report comparison_harness(const sim_config& base, int n_pairs,
                                     std::uint64_t seed);

// Sup distance of u from a constant level over the bulk window
// [(1-eps) g, (1-eps) h]; NaN when no node falls inside the window.
double bulk_deviation(const front_state& st, double level, double eps = 0.05);

}  // namespace nlfront
