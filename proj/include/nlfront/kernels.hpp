#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nlfront {

// Dispersal kernel families. Every family except `tabulated` is symmetric
// about its center; asymmetry is introduced through `shift`.
enum class kernel_family {
  uniform,      // J = 1/(2a) on [-a, a]
  triangular,   // J = (a - |x|)/a^2 on [-a, a]
  gaussian,     // J = exp(-x^2/(2 s^2)) / (s sqrt(2 pi))
  laplace,      // J = exp(-|x|/b) / (2 b)
  compact_bump, // J = C exp(-1/(1 - (x/a)^2)) on (-a, a)
  power_tail,   // J = lambda (rho + |x|)^(-alpha), rho fixed by unit mass
  log_tail,     // J = lambda / ((a0 + |x|) ln(a0 + |x|)^beta), a0 by unit mass
  tabulated,    // piecewise-linear from a two-column table
};

const char* kernel_family_name(kernel_family f);

struct kernel_spec {
  kernel_family family = kernel_family::uniform;
  double a = 1.0;       // half-width: uniform, triangular, compact_bump
  double s = 1.0;       // gaussian standard deviation
  double b = 1.0;       // laplace scale
  double alpha = 2.5;   // power-tail exponent (> 1)
  double beta = 2.0;    // log-tail exponent (> 1)
  double lambda = 1.0;  // tail constant (> 0)
  double shift = 0.0;   // translation of the kernel center
  std::vector<double> table_x;  // tabulated: strictly increasing abscissae
  std::vector<double> table_j;  // tabulated: nonnegative values
};

// Integrability classification of the two tails.
struct heavy_tail_info {
  double alpha = 0.0;
  double lambda = 0.0;
};
struct log_heavy_tail_info {
  double beta = 0.0;
  double lambda = 0.0;
};
struct tail_class {
  bool thin_plus = true;   // exists nu > 0 with finite right exponential moment
  bool thin_minus = true;  // mirror condition on the left
  bool j1_plus = true;     // finite first moment of the right tail
  bool j1_minus = true;
  std::optional<heavy_tail_info> heavy;          // algebraic tails J ~ lambda |x|^-alpha
  std::optional<log_heavy_tail_info> log_heavy;  // J ~ lambda / (|x| ln^beta |x|)
};

namespace detail {
class kernel_base;
}

// Immutable, validated dispersal kernel. Thread-safe to share once built.
class kernel {
 public:
  kernel() = default;

  const kernel_spec& spec() const { return spec_; }

  // J(x).
  double operator()(double x) const;
  // Tail function K(z) = integral of J over (z, +inf). Nonincreasing, 1 -> 0.
  double tail(double z) const;
  // Integral of K over (0, w); signed for w < 0. Grows at most linearly.
  double integrated_tail(double w) const;
  // Exponential moment m(nu) = integral of J(x) e^(nu x); +inf when divergent.
  double mgf(double nu) const;
  // First moment of the right tail, integral of K over (0, +inf); +inf when
  // the tail is not integrable (j1_plus false).
  double first_moment_right() const;

  double sup_j() const;
  // Length scale of the central part of the kernel; spatial steps are
  // validated against core_width()/8.
  double core_width() const;
  // R with integral of J outside [-R, R] below the construction mass
  // tolerance (1e-8); capped at 1e300 for extremely slow log tails.
  double trunc_radius() const;
  const tail_class& tails() const { return tails_; }

  // Kernel evaluating x -> J(-x); tail classification sides swapped.
  kernel reflected() const;

 private:
  kernel_spec spec_;
  std::shared_ptr<const detail::kernel_base> base_;
  double shift_ = 0.0;
  tail_class tails_;
  double radius_ = 0.0;

  friend kernel make_kernel(const kernel_spec&);
};

// Validates the spec, computes the normalization, classifies the tails.
// Throws InvalidParameter (bad ranges, J(0) = 0) or NormalizationFailure
// (tabulated kernel with zero mass).
kernel make_kernel(const kernel_spec& spec);

inline kernel reflect(const kernel& k) { return k.reflected(); }

// Linear spreading speed functional. For direction `right`:
//   c = inf_{nu > 0} [d m(nu) - d + f0] / nu,
// +inf when the right tail admits no finite exponential moment. For
// direction `left` the value is the negated right speed of the reflected
// kernel (so symmetric kernels give c_left = -c_right), -inf when the left
// tail is not thin.
enum class direction { right, left };

struct c_star_result {
  double value = 0.0;  // extended real: +/-inf encodes a fat tail
  double nu = 0.0;     // optimizing exponent (signed); NaN when not finite
  bool finite = false;
};

c_star_result c_star(const kernel& k, double d, double f0, direction dir);

// Outgoing-mass moment A = integral over x in (-k, -inner) of K(-x), with
// inner = delta*k (linear_inner) or k^delta (power_inner). Equals the double
// integral of J(x - y) over x in the band and y > 0.
enum class flux_mode { linear_inner, power_inner };

double flux_moment(const kernel& k, double k_outer, double delta, flux_mode mode);

}  // namespace nlfront
