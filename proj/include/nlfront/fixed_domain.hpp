#pragma once

#include <vector>

#include "nlfront/kernels.hpp"
#include "nlfront/reactions.hpp"

namespace nlfront {

struct interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

// Dense uniform-grid discretization of
//   phi -> d * int_I J(x - y) phi(y) dy - d phi + c phi' + f0 phi
// on I = (lo, hi).  The integral part is Toeplitz (kernel values depend only on
// the node-index difference) with trapezoid quadrature weights, so the matrix
// -- and therefore its spectrum -- depends on the interval only through its
// length.  The drift uses the upwind one-sided difference (forward for c > 0);
// the outflow end node has no neighbor on the upwind side and carries no drift
// stencil.
struct operator_disc {
  interval iv;
  int n = 0;
  double dx = 0.0;
  double d = 0.0;
  double c = 0.0;
  double f0 = 0.0;
  std::vector<double> nodes;
  std::vector<double> jrow;     // J(m * dx), m in [-(n-1), n-1], at offset n-1
  std::vector<double> weights;  // trapezoid weights, dx/2 at the two ends

  double entry(int i, int j) const;
  // y = A x with the full operator (integral, decay, drift, and f0 terms).
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  // y_i = sum_j J((i-j) dx) w_j x_j, just the integral part without the d
  // factor.  Exposed so time steppers can keep the positivity-preserving
  // update order u (1 - dt d) + dt f(u) + dt d conv.
  void convolve(const std::vector<double>& x, std::vector<double>& y) const;
};

struct eigen_result {
  interval iv;
  int n = 0;
  double lambda_p = 0.0;
  std::vector<double> eigenfunction;  // strictly positive, sup-normalized
  int iterations = 0;
  double residual = 0.0;  // sup norm of A phi - lambda phi with sup phi = 1
};

operator_disc assemble(const kernel& k, double d, double c, double f0, interval iv, int n);

eigen_result principal_eigenvalue(const operator_disc& op, double tol = 1e-8,
                                  int max_iter = 500000);

// Critical range length: the full interval length L at which the principal
// eigenvalue of the drift-free operator on (-L/2, L/2) crosses zero.  Returns
// 0 when d <= f0 (every interval already has a positive principal eigenvalue).
double ell_star(const kernel& k, double d, double f0, double tol = 1e-4);

struct fixed_trajectory {
  std::vector<double> times;
  std::vector<double> sup_u;
  std::vector<double> nodes;
  std::vector<double> final_u;
};

// Explicit time marching of u_t = d (J * u - u) + f(u) on a fixed interval
// with u = 0 outside.  u0 holds node values on the same uniform grid that
// assemble() would produce for (iv, n = u0.size()).
fixed_trajectory evolve_fixed(const kernel& k, const reaction& f, double d, interval iv,
                              const std::vector<double>& u0, double t_end, double dt);

}  // namespace nlfront
