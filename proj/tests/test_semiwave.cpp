#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlfront/semiwave.hpp"
#include "support/oracles.hpp"

using namespace nlfront;

namespace {

kernel unit_uniform() {
  kernel_spec s;
  s.family = kernel_family::uniform;
  s.a = 1.0;
  return make_kernel(s);
}

reaction logistic(double r) {
  reaction_spec s;
  s.family = reaction_family::logistic;
  s.r = r;
  return make_reaction(s);
}

double interp(const std::vector<double>& x, const std::vector<double>& phi, double q) {
  auto it = std::upper_bound(x.begin(), x.end(), q);
  if (it == x.begin()) return phi.front();
  if (it == x.end()) return phi.back();
  std::size_t j = static_cast<std::size_t>(it - x.begin());
  double t = (q - x[j - 1]) / (x[j] - x[j - 1]);
  return phi[j - 1] + t * (phi[j] - phi[j - 1]);
}

// Direct O(n^2) re-evaluation of the delta-floored profile map: full-range
// convolution with the analytic closures, then the exponential kernel applied
// panel by panel with fine Simpson quadrature instead of closed-form weights.
std::vector<double> oracle_map(const perturbed_profile& pp, const kernel& k,
                               const reaction& f, double d) {
  const auto& x = pp.x;
  const auto& phi = pp.phi;
  const std::size_t nn = x.size();
  const double dx = x[1] - x[0];
  const double m = pp.m_const;
  const double c = pp.c;
  const double delta = pp.delta;

  std::vector<double> g(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    double conv = delta + (1.0 - delta) * k.tail(dx * static_cast<double>(i));
    for (std::size_t j = 0; j < nn; ++j) {
      double ca = (j == 0) ? x[0] : 0.5 * (x[j - 1] + x[j]);
      double cb = (j + 1 == nn) ? x[nn - 1] : 0.5 * (x[j] + x[j + 1]);
      conv += (k.tail(x[i] - cb) - k.tail(x[i] - ca)) * (phi[j] - delta);
    }
    g[i] = d * conv + f(phi[i]) + (c * m - d) * phi[i];
  }

  std::vector<double> panel(nn - 1);
  for (std::size_t p = 0; p + 1 < nn; ++p)
    panel[p] = oracle::simpson(
        [&](double tau) {
          double gt = g[p] + (g[p + 1] - g[p]) * (tau / dx);
          return std::exp(-m * tau) * gt;
        },
        0.0, dx, 128);

  std::vector<double> out(nn);
  out[nn - 1] = delta;
  for (std::size_t i = 0; i + 1 < nn; ++i) {
    double s = 0.0;
    for (std::size_t p = nn - 1; p-- > i;) s += std::exp(m * (x[i] - x[p])) * panel[p];
    double val = std::exp(m * x[i]) * delta + s / c;
    out[i] = std::clamp(val, delta, 1.0);
  }
  return out;
}

}  // namespace

TEST_CASE("floored profile map: monotone ascent to an ordered fixed point") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  perturbed_profile pp = iterate_p(0.5, 0.01, k, f, 1.0, 12.0, 384);
  REQUIRE(pp.x.size() == 385);
  CHECK(pp.x.front() == doctest::Approx(-12.0));
  CHECK(pp.x.back() == doctest::Approx(0.0));
  CHECK(pp.phi.back() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(pp.min_ascent >= -1e-9);
  CHECK(pp.sup_change < 1e-9);
  CHECK(pp.deep);
  CHECK(pp.phi.front() >= 1.0 - 1e-3);
  // The continuum profile is nonincreasing; on the grid the left-edge
  // closure (phi = 1 beyond -X) leaves an O(dx^2) wiggle in the saturated
  // plateau one kernel radius inside the edge, so allow that much noise.
  double dx = 12.0 / 384.0;
  for (std::size_t i = 0; i + 1 < pp.phi.size(); ++i) {
    CHECK(pp.phi[i] >= pp.phi[i + 1] - 0.5 * dx * dx);
    CHECK(pp.phi[i] >= 0.01);
    CHECK(pp.phi[i] <= 1.0);
  }

  perturbed_profile lower = iterate_p(0.5, 0.005, k, f, 1.0, 12.0, 384);
  for (std::size_t i = 0; i < pp.phi.size(); ++i)
    CHECK(pp.phi[i] >= lower.phi[i] - 1e-9);  // smaller floor, smaller profile
}

TEST_CASE("converged profile is a fixed point of an independently coded map") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  perturbed_profile pp = iterate_p(0.5, 0.01, k, f, 1.0, 12.0, 384);
  std::vector<double> mapped = oracle_map(pp, k, f, 1.0);
  double sup = 0.0;
  for (std::size_t i = 0; i < mapped.size(); ++i)
    sup = std::max(sup, std::abs(mapped[i] - pp.phi[i]));
  CHECK(sup <= 1e-8);
}

TEST_CASE("profile iteration input validation") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  using oracle::code_of;
  CHECK(code_of([&] { iterate_p(-0.5, 0.01, k, f, 1.0, 12.0, 384); }) ==
        errc::invalid_parameter);
  CHECK(code_of([&] { iterate_p(0.5, 0.0, k, f, 1.0, 12.0, 384); }) ==
        errc::invalid_parameter);
  CHECK(code_of([&] { iterate_p(0.5, 1.5, k, f, 1.0, 12.0, 384); }) ==
        errc::invalid_parameter);
  CHECK(code_of([&] { iterate_p(0.5, 0.01, k, f, 1.0, 12.0, 8); }) ==
        errc::invalid_parameter);
}

TEST_CASE("shallow grids are flagged unless explicitly allowed") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  // Above the linear speed the profile detaches from 1 within any fixed
  // window, so a short grid cannot be deep.
  CHECK(oracle::code_of([&] { iterate_p(1.0, 0.01, k, f, 1.0, 3.0, 96); }) ==
        errc::truncation_too_shallow);
  perturbed_profile pp = iterate_p(1.0, 0.01, k, f, 1.0, 3.0, 96, 1e-10, 200000, false);
  CHECK_FALSE(pp.deep);
}

TEST_CASE("wave extraction: settled fronts below the linear speed") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  std::vector<double> ladder{0.02, 0.005, 0.001};
  wave_profile w = extract_wave(0.5, k, f, 1.0, ladder, 12.0, 768);
  CHECK(w.kind == wave_kind::semi_wave);
  CHECK(w.c == doctest::Approx(0.5));
  CHECK(w.x.back() == doctest::Approx(0.0));
  CHECK(w.phi.back() == 0.0);
  CHECK(w.front_anchor > -6.0);
  CHECK(w.front_anchor < 0.0);
  CHECK(interp(w.x, w.phi, w.front_anchor) == doctest::Approx(0.5).epsilon(0.02));

  double m = m_of_c(w, k, 1.0);
  CHECK(m > 0.0);
  // Independent quadrature of K(-x) phi(x); the unit uniform tail vanishes
  // past 1, so the analytic closure beyond the grid contributes nothing.
  double ref = oracle::simpson(
      [&](double q) { return k.tail(-q) * interp(w.x, w.phi, q); }, -2.0, 0.0, 40000);
  CHECK(m == doctest::Approx(ref).epsilon(2e-3));
}

TEST_CASE("wave extraction: escaping fronts above the linear speed") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  std::vector<double> ladder{0.02, 0.005, 0.001};
  wave_profile w = extract_wave(1.0, k, f, 1.0, ladder, 12.0, 768);
  CHECK(w.kind == wave_kind::traveling_wave);
  CHECK(w.front_anchor == 0.0);
  CHECK(interp(w.x, w.phi, 0.0) == doctest::Approx(0.5).epsilon(0.02));
  for (std::size_t i = 0; i + 1 < w.phi.size(); ++i)
    CHECK(w.phi[i] >= w.phi[i + 1] - 1e-12);

  CHECK(oracle::code_of([&] { m_of_c(w, k, 1.0); }) == errc::invalid_parameter);
  CHECK(oracle::code_of([&] { extract_wave(0.5, k, f, 1.0, {}, 12.0, 768); }) ==
        errc::invalid_parameter);
  CHECK(oracle::code_of([&] {
          extract_wave(0.5, k, f, 1.0, {0.01, 0.02}, 12.0, 768);
        }) == errc::invalid_parameter);
}

TEST_CASE("profiles and outgoing mass decrease with the speed") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  std::vector<double> ladder{0.02, 0.005, 0.001};
  wave_profile slow = extract_wave(0.3, k, f, 1.0, ladder, 12.0, 768);
  wave_profile fast = extract_wave(0.6, k, f, 1.0, ladder, 12.0, 768);
  REQUIRE(slow.kind == wave_kind::semi_wave);
  REQUIRE(fast.kind == wave_kind::semi_wave);
  CHECK(slow.front_anchor > fast.front_anchor + 0.01);
  for (std::size_t i = 0; i < slow.phi.size(); ++i)
    CHECK(slow.phi[i] >= fast.phi[i] - 1e-3);
  CHECK(m_of_c(slow, k, 1.0) > m_of_c(fast, k, 1.0));
}

TEST_CASE("extracted semi-wave nearly solves the stationary equation") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  std::vector<double> ladder{0.02, 0.005, 0.001, 1e-4, 1e-5};
  wave_profile w = extract_wave(0.5, k, f, 1.0, ladder, 12.0, 1536);
  REQUIRE(w.kind == wave_kind::semi_wave);
  CHECK(residual(w, k, f, 1.0) < 1e-3);
}

TEST_CASE("selected speed: root of c - M(c) inside (0, c_star)") {
  kernel k = unit_uniform();
  reaction f = logistic(1.0);
  speed_solve s = find_c0(k, f, 1.0, 2.0, 1e-3);
  CHECK(s.c0 > 0.0);
  CHECK(s.c0 < 0.9051);
  CHECK(s.m_at_c0 == doctest::Approx(s.c0).epsilon(0.02));
  CHECK(s.residual <= 5e-3);
  CHECK(s.bracket_history.size() >= 5);
  for (auto& [cprobe, pv] : s.bracket_history) {
    CHECK(cprobe > 0.0);
    CHECK(std::isfinite(pv));
  }

  speed_solve left = find_c0_left(k, f, 1.0, 2.0, 1e-3);
  CHECK(std::abs(left.c0 - s.c0) <= 1e-9);  // symmetric kernel, mirror problem

  // More dispersal throughput, faster selected front.
  speed_solve s_small = find_c0(k, f, 1.0, 0.5, 1e-3);
  CHECK(s_small.c0 < s.c0);
}

TEST_CASE("fat right tails have no finite selected speed") {
  kernel_spec p;
  p.family = kernel_family::power_tail;
  p.alpha = 1.5;
  p.lambda = 0.25;
  kernel k = make_kernel(p);
  reaction f = logistic(1.0);
  CHECK(oracle::code_of([&] { find_c0(k, f, 1.0, 1.0); }) == errc::divergent_flux);

  wave_profile fake;
  fake.kind = wave_kind::semi_wave;
  fake.c = 0.5;
  fake.depth = 4.0;
  for (int i = 0; i <= 64; ++i) {
    fake.x.push_back(-4.0 + i / 16.0);
    fake.phi.push_back(1.0 - i / 64.0);
  }
  CHECK(oracle::code_of([&] { m_of_c(fake, k, 1.0); }) == errc::divergent_flux);
}

TEST_CASE("heavy but integrable tails still carry semi-waves at every speed") {
  kernel_spec p;
  p.family = kernel_family::power_tail;
  p.alpha = 2.5;
  p.lambda = 1.0;
  kernel k = make_kernel(p);
  reaction f = logistic(1.0);
  std::vector<double> ladder{0.02, 0.005, 0.001};
  wave_profile w = extract_wave(0.3, k, f, 1.0, ladder, 12.0, 384);
  CHECK(w.kind == wave_kind::semi_wave);
  double m = m_of_c(w, k, 1.0);
  CHECK(std::isfinite(m));
  CHECK(m > 0.0);
}
