#pragma once

#include <string>
#include <vector>

namespace nlfront {

enum class reaction_family {
  logistic,   // f(u) = r u (1 - u)
  cubic_kpp,  // f(u) = r u (1 - u)(1 + b u), b in [0, 1] keeps f(u)/u nonincreasing
  tabulated,  // piecewise-linear from a two-column table (u, f(u))
};

const char* reaction_family_name(reaction_family f);

struct reaction_spec {
  reaction_family family = reaction_family::logistic;
  double r = 1.0;  // growth rate
  double b = 0.0;  // cubic shape parameter
  std::vector<double> table_u;  // tabulated: strictly increasing levels
  std::vector<double> table_f;  // tabulated: reaction values
};

// Validated KPP reaction term. Immutable and freely shareable.
class reaction {
 public:
  reaction() = default;

  const reaction_spec& spec() const { return spec_; }

  double operator()(double u) const;  // f(u)
  double derivative(double u) const;  // f'(u); tabulated uses segment slopes

  double f0() const { return f0_; }  // f'(0)
  double f1() const { return f1_; }  // f'(1)
  // Smallest sampled level with f <= 0 everywhere at and beyond it.
  double k0() const { return k0_; }

  // Lipschitz constant of f on [0, level] (sampled sup of |f'|).
  double lipschitz(double level) const;

 private:
  reaction_spec spec_;
  double f0_ = 0.0;
  double f1_ = 0.0;
  double k0_ = 1.0;

  friend reaction make_reaction(const reaction_spec&);
};

// Runs the sampled KPP checks (f(0)=f(1)=0, f'(0)>0>f'(1), f(u)/u
// nonincreasing on (0,2], saturation level exists) and reports the first
// violated check via NotKPP. Structural table problems raise InvalidParameter.
reaction make_reaction(const reaction_spec& spec);

inline double linearize(const reaction& f) { return f.f0(); }

}  // namespace nlfront
