#pragma once

#include <utility>
#include <vector>

#include "nlfront/kernels.hpp"
#include "nlfront/reactions.hpp"

namespace nlfront {

// Fixed point of the delta-floored profile map at speed c, computed on a
// uniform grid over [-X, 0] with phi == delta on [0, inf) and phi == 1 left
// of -X. Nonincreasing in x ... delta <= phi <= 1, reached by monotone ascent
// from the constant delta.
struct perturbed_profile {
  double c = 0.0;
  double delta = 0.0;
  double m_const = 0.0;     // exponential weight M of the contraction map
  double depth = 0.0;       // X
  std::vector<double> x;    // uniform grid, x.front() = -X, x.back() = 0
  std::vector<double> phi;
  int iterations = 0;
  double sup_change = 0.0;  // last sup |phi_{n+1} - phi_n|
  double min_ascent = 0.0;  // most negative pointwise increment seen (pre-clamp)
  bool deep = false;        // phi(-X) within the truncation tolerance of 1
};

// profile_tol: grid-independent accuracy target for extracted profiles; the
// truncation check requires phi(-X) >= 1 - max(10 * profile_tol, 20 * K(X)).
constexpr double k_profile_tol = 1e-5;

perturbed_profile iterate_p(double c, double delta, const kernel& k, const reaction& f,
                            double d, double x_depth, int n, double tol = 1e-10,
                            int max_iter = 200000, bool require_deep = true);

enum class wave_kind { semi_wave, traveling_wave };

const char* wave_kind_name(wave_kind k);

// Extracted limit profile. Semi-waves are anchored so phi(0) = 0 (the grid
// covers [-X, 0]); traveling waves are shifted so phi(0) = 1/2.
struct wave_profile {
  wave_kind kind = wave_kind::semi_wave;
  double c = 0.0;
  double depth = 0.0;
  std::vector<double> x;
  std::vector<double> phi;
  double front_anchor = 0.0;  // x with phi = 1/2 (0 for traveling waves)
};

// Runs iterate_p along the decreasing delta floors and classifies by the
// drift of the half-level anchor: a settled anchor in the right half gives a
// semi-wave, an anchor escaping past -X/2 a traveling wave. One automatic
// retry at doubled depth; Inconclusive if the drift still has not resolved.
wave_profile extract_wave(double c, const kernel& k, const reaction& f, double d,
                          const std::vector<double>& delta_sequence, double x_depth, int n);

// Outgoing-mass functional M(c) = mu * integral over x < 0 of K(-x) phi^c(x),
// with the analytic phi = 1 closure beyond -X. Requires an integrable right
// tail (DivergentFlux otherwise) and a semi-wave profile.
double m_of_c(const wave_profile& w, const kernel& k, double mu);

struct speed_solve {
  double c0 = 0.0;
  double m_at_c0 = 0.0;
  double residual = 0.0;  // |c0 - M(c0)| at the returned root
  std::vector<std::pair<double, double>> bracket_history;  // (c, c - M(c)) probes
};

// Unique root of P(c) = c - M(c) on (0, c_star): the selected front speed.
speed_solve find_c0(const kernel& k, const reaction& f, double d, double mu,
                    double tol = 1e-3);
// Left-front speed magnitude: find_c0 on the reflected kernel.
speed_solve find_c0_left(const kernel& k, const reaction& f, double d, double mu,
                         double tol = 1e-3);

// Sup over interior grid nodes of |d (J*phi) - d phi + c phi' + f(phi)| with
// centered differences and the profile's own closure conventions.
double residual(const wave_profile& w, const kernel& k, const reaction& f, double d);

}  // namespace nlfront
