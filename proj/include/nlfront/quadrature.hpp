#pragma once

#include <functional>
#include <vector>

namespace nlfront {

// Composite trapezoid weights for an arbitrary sorted node set (size >= 2).
std::vector<double> trapezoid_weights(const std::vector<double>& xs);

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys);

// Adaptive Simpson with Richardson acceptance; tol is absolute over [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 45);

struct min_result {
  double x;
  double fx;
};

// Golden-section minimizer on [a, b] for a unimodal f.
min_result golden_section_min(const std::function<double(double)>& f, double a, double b,
                              double xtol, int max_iter = 400);

// Bisection root of a continuous f with f(lo), f(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double xtol,
                   int max_iter = 400);

// Exact integral over [a, b] of the piecewise-linear interpolant through (xs, ys),
// treated as 0 outside [xs.front(), xs.back()].
double integrate_piecewise_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double a, double b);

}  // namespace nlfront
