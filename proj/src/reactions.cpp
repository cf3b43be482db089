#include "nlfront/reactions.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "nlfront/errors.hpp"

namespace nlfront {

namespace {

constexpr int k_samples = 10000;       // sampled grid over (0, 2]
constexpr double k_endpoint_tol = 1e-10;

double eval_family(const reaction_spec& s, double u) {
  switch (s.family) {
    case reaction_family::logistic:
      return s.r * u * (1.0 - u);
    case reaction_family::cubic_kpp:
      return s.r * u * (1.0 - u) * (1.0 + s.b * u);
    case reaction_family::tabulated: {
      if (u <= s.table_u.front()) return s.table_f.front();
      if (u >= s.table_u.back()) return s.table_f.back();
      auto it = std::upper_bound(s.table_u.begin(), s.table_u.end(), u);
      std::size_t i = static_cast<std::size_t>(it - s.table_u.begin()) - 1;
      double t = (u - s.table_u[i]) / (s.table_u[i + 1] - s.table_u[i]);
      return s.table_f[i] + t * (s.table_f[i + 1] - s.table_f[i]);
    }
  }
  return 0.0;
}

double eval_derivative(const reaction_spec& s, double u) {
  switch (s.family) {
    case reaction_family::logistic:
      return s.r * (1.0 - 2.0 * u);
    case reaction_family::cubic_kpp:
      // d/du [u + (b-1)u^2 - b u^3]
      return s.r * (1.0 + 2.0 * (s.b - 1.0) * u - 3.0 * s.b * u * u);
    case reaction_family::tabulated: {
      if (u < s.table_u.front() || u > s.table_u.back()) return 0.0;
      auto it = std::upper_bound(s.table_u.begin(), s.table_u.end(), u);
      std::size_t i = static_cast<std::size_t>(it - s.table_u.begin());
      if (i == 0) i = 1;
      if (i >= s.table_u.size()) i = s.table_u.size() - 1;
      return (s.table_f[i] - s.table_f[i - 1]) / (s.table_u[i] - s.table_u[i - 1]);
    }
  }
  return 0.0;
}

}  // namespace

const char* reaction_family_name(reaction_family f) {
  switch (f) {
    case reaction_family::logistic: return "logistic";
    case reaction_family::cubic_kpp: return "cubic_kpp";
    case reaction_family::tabulated: return "tabulated";
  }
  return "unknown";
}

double reaction::operator()(double u) const { return eval_family(spec_, u); }

double reaction::derivative(double u) const { return eval_derivative(spec_, u); }

double reaction::lipschitz(double level) const {
  double top = std::max(level, 1e-12);
  double lip = 0.0;
  for (int i = 0; i <= k_samples; ++i) {
    double u = top * static_cast<double>(i) / k_samples;
    lip = std::max(lip, std::abs(eval_derivative(spec_, u)));
  }
  return lip;
}

reaction make_reaction(const reaction_spec& spec) {
  if (spec.family == reaction_family::tabulated) {
    if (spec.table_u.size() != spec.table_f.size())
      fail(errc::invalid_parameter, "tabulated reaction columns differ in length");
    if (spec.table_u.size() < 2)
      fail(errc::invalid_parameter, "tabulated reaction needs at least two samples");
    for (std::size_t i = 0; i < spec.table_u.size(); ++i) {
      if (!std::isfinite(spec.table_u[i]) || !std::isfinite(spec.table_f[i]))
        fail(errc::invalid_parameter, "tabulated reaction contains non-finite entries");
      if (i > 0 && !(spec.table_u[i] > spec.table_u[i - 1]))
        fail(errc::invalid_parameter, "tabulated reaction levels must be strictly increasing");
    }
  } else {
    if (!std::isfinite(spec.r) || !std::isfinite(spec.b))
      fail(errc::invalid_parameter, "reaction parameters must be finite");
  }

  auto f = [&](double u) { return eval_family(spec, u); };
  auto fp = [&](double u) { return eval_derivative(spec, u); };

  if (std::abs(f(0.0)) > k_endpoint_tol)
    fail(errc::not_kpp, "f(0) = " + std::to_string(f(0.0)) + " must vanish");
  if (std::abs(f(1.0)) > k_endpoint_tol)
    fail(errc::not_kpp, "f(1) = " + std::to_string(f(1.0)) + " must vanish");

  double f0 = fp(0.0);
  double f1 = fp(1.0);
  if (!(f0 > 0.0)) fail(errc::not_kpp, "f'(0) = " + std::to_string(f0) + " must be positive");
  if (!(f1 < 0.0)) fail(errc::not_kpp, "f'(1) = " + std::to_string(f1) + " must be negative");

  // f(u)/u nonincreasing on a sampled grid of (0, 2].
  double prev_ratio = f0;  // limit value at 0+
  for (int i = 1; i <= k_samples; ++i) {
    double u = 2.0 * static_cast<double>(i) / k_samples;
    double ratio = f(u) / u;
    double slack = 1e-12 * std::max(1.0, std::abs(prev_ratio));
    if (ratio > prev_ratio + slack)
      fail(errc::not_kpp,
           "f(u)/u increases near u = " + std::to_string(u) + " (KPP requires nonincreasing)");
    prev_ratio = ratio;
  }

  // Saturation level: smallest sampled u with f <= 0 at and beyond it.
  int first_nonpos = -1;
  for (int i = k_samples; i >= 1; --i) {
    double u = 2.0 * static_cast<double>(i) / k_samples;
    if (f(u) > 1e-14) break;
    first_nonpos = i;
  }
  if (first_nonpos < 0)
    fail(errc::not_kpp, "no saturation level on (0,2]: f stays positive at u = 2");

  reaction out;
  out.spec_ = spec;
  out.f0_ = f0;
  out.f1_ = f1;
  out.k0_ = 2.0 * static_cast<double>(first_nonpos) / k_samples;
  return out;
}

}  // namespace nlfront
