#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlfront/free_boundary.hpp"
#include "support/oracles.hpp"

using namespace nlfront;

namespace {

kernel unit_uniform() {
  kernel_spec s;
  s.family = kernel_family::uniform;
  s.a = 1.0;
  return make_kernel(s);
}

kernel gaussian(double s_len) {
  kernel_spec s;
  s.family = kernel_family::gaussian;
  s.s = s_len;
  return make_kernel(s);
}

reaction logistic(double r) {
  reaction_spec s;
  s.family = reaction_family::logistic;
  s.r = r;
  return make_reaction(s);
}

sim_config base_config(double amp = 0.5) {
  sim_config c{.k = unit_uniform(), .f = logistic(1.0)};
  c.d = 1.0;
  c.mu = 1.0;
  c.h0 = 1.0;
  c.u0 = [amp](double x) { return amp * std::pow(std::cos(0.5 * M_PI * x), 2); };
  c.dx = 0.05;
  c.dt = 0.05;
  c.t_max = 5.0;
  c.record_every = 0.5;
  return c;
}

double interp(const std::vector<double>& x, const std::vector<double>& u, double q) {
  auto it = std::upper_bound(x.begin(), x.end(), q);
  if (it == x.begin()) return u.front();
  if (it == x.end()) return u.back();
  std::size_t j = static_cast<std::size_t>(it - x.begin());
  double t = (q - x[j - 1]) / (x[j] - x[j - 1]);
  return u[j - 1] + t * (u[j] - u[j - 1]);
}

front_state synthetic_state() {
  front_state st;
  st.t = 0.0;
  st.g = -1.0;
  st.h = 1.0;
  st.dx = 0.0;
  double dx = 0.0125;
  st.x.push_back(st.g);
  for (int q = -79; q <= 79; ++q) st.x.push_back(q * dx);
  st.x.push_back(st.h);
  st.u.assign(st.x.size(), 0.0);
  for (std::size_t i = 1; i + 1 < st.x.size(); ++i) {
    double x = st.x[i];
    st.u[i] = 0.4 * std::pow(std::cos(0.5 * M_PI * x), 2) * (1.0 + 0.3 * x);
  }
  return st;
}

}  // namespace

TEST_CASE("front fluxes match a fine quadrature of the dispersal tail") {
  front_state st = synthetic_state();
  kernel k = gaussian(0.6);
  double mu = 1.3;
  double rf_ref =
      mu * oracle::simpson(
               [&](double q) { return k.tail(st.h - q) * interp(st.x, st.u, q); },
               st.g, st.h, 40000);
  double lf_ref =
      mu * oracle::simpson(
               [&](double q) { return (1.0 - k.tail(st.g - q)) * interp(st.x, st.u, q); },
               st.g, st.h, 40000);
  CHECK(right_flux(st, k, mu) == doctest::Approx(rf_ref).epsilon(1e-3));
  CHECK(left_flux(st, k, mu) == doctest::Approx(lf_ref).epsilon(1e-3));
  CHECK(right_flux(st, k, mu) > left_flux(st, k, mu));  // density skewed right
  CHECK(right_flux(st, k, 0.0) == 0.0);
}

TEST_CASE("one step moves the fronts by exactly dt times the flux") {
  front_state st = synthetic_state();
  sim_config c{.k = gaussian(0.6), .f = logistic(1.0)};
  c.d = 1.0;
  c.mu = 1.3;
  c.dt = 0.01;
  front_state ns = step(st, c);
  CHECK(ns.h == st.h + c.dt * right_flux(st, c.k, c.mu));
  CHECK(ns.g == st.g - c.dt * left_flux(st, c.k, c.mu));
  CHECK(ns.t == doctest::Approx(st.t + c.dt));
  CHECK(ns.u.front() == 0.0);
  CHECK(ns.u.back() == 0.0);
  CHECK(ns.x.front() == ns.g);
  CHECK(ns.x.back() == ns.h);
  for (std::size_t i = 0; i + 1 < ns.x.size(); ++i) CHECK(ns.x[i] < ns.x[i + 1]);
  for (double v : ns.u) CHECK(v >= 0.0);
  CHECK(ns.h > st.h);
  CHECK(ns.g < st.g);
}

TEST_CASE("uniform-lattice steps keep interior nodes on the lattice") {
  sim_config c = base_config();
  c.t_max = 3.0;
  c.on_record = [&](const front_state& s) {
    REQUIRE(s.x.size() >= 3);
    CHECK(s.x.front() == s.g);
    CHECK(s.x.back() == s.h);
    CHECK(s.u.front() == 0.0);
    CHECK(s.u.back() == 0.0);
    for (std::size_t i = 1; i + 1 < s.x.size(); ++i) {
      long q = std::lround(s.x[i] / c.dx);
      CHECK(s.x[i] == doctest::Approx(q * c.dx).epsilon(1e-12));
      CHECK(s.u[i] >= 0.0);
    }
  };
  run_result r = run(c);
  CHECK(r.series.rows.size() == 7);  // t = 0, 0.5, ..., 3
  for (std::size_t i = 0; i < r.series.rows.size(); ++i)
    CHECK(r.series.rows[i].t == doctest::Approx(0.5 * static_cast<double>(i)).epsilon(1e-9));
  for (std::size_t i = 1; i < r.series.rows.size(); ++i) {
    CHECK(r.series.rows[i].h >= r.series.rows[i - 1].h);
    CHECK(r.series.rows[i].g <= r.series.rows[i - 1].g);
  }
}

TEST_CASE("front positions refine at first order in dt") {
  auto final_h = [&](double dt) {
    sim_config c = base_config();
    c.dt = dt;
    c.t_max = 4.0;
    return run(c).final_state.h;
  };
  double h1 = final_h(0.2), h2 = final_h(0.1), h3 = final_h(0.05);
  double e1 = std::abs(h1 - h2), e2 = std::abs(h2 - h3);
  CHECK(e2 > 0.0);
  CHECK(e1 / e2 >= 1.5);
}

TEST_CASE("larger initial data never falls behind smaller data") {
  std::vector<front_state> lo_states, hi_states;
  sim_config lo = base_config(0.3);
  lo.u_bound = 1.0;
  lo.on_record = [&](const front_state& s) { lo_states.push_back(s); };
  run(lo);
  sim_config hi = base_config(0.6);
  hi.u_bound = 1.0;
  hi.on_record = [&](const front_state& s) { hi_states.push_back(s); };
  run(hi);
  REQUIRE(lo_states.size() == hi_states.size());
  for (std::size_t r = 0; r < lo_states.size(); ++r) {
    CHECK(hi_states[r].h >= lo_states[r].h - 1e-12);
    CHECK(hi_states[r].g <= lo_states[r].g + 1e-12);
  }
}

TEST_CASE("outcome classification reads the recorded series") {
  time_series s;
  s.rows.push_back({0.0, -0.4, 0.4, 0.5, 0.3, 0.0, 0.0});
  s.rows.push_back({50.0, -1.2, 1.2, 0.8, 1.5, 0.1, 0.1});
  CHECK(classify_outcome(s, 1.0) == outcome::spreading);
  CHECK(classify_outcome(s, 0.0) == outcome::spreading);  // any growth counts

  time_series v;
  for (int i = 0; i <= 100; ++i) {
    double t = i * 1.0;
    double sup = 0.5 * std::exp(-0.2 * t);
    v.rows.push_back({t, -0.5 - 1e-9 * t, 0.5 + 1e-9 * t, sup, sup, 0.0, 0.0});
  }
  CHECK(classify_outcome(v, 2.0) == outcome::vanishing);

  time_series undec;
  undec.rows.push_back({0.0, -0.5, 0.5, 0.5, 0.3, 0.0, 0.0});
  undec.rows.push_back({10.0, -0.6, 0.6, 0.4, 0.3, 0.0, 0.0});
  CHECK(classify_outcome(undec, 2.0) == outcome::undecided);

  time_series single;
  single.rows.push_back({0.0, -0.5, 0.5, 0.5, 0.3, 0.0, 0.0});
  CHECK(classify_outcome(single, 2.0) == outcome::undecided);

  CHECK(oracle::code_of([&] { classify_outcome(s, -1.0); }) == errc::invalid_parameter);
}

TEST_CASE("dispersal threshold: bisection and its failure modes") {
  sim_config c = base_config();
  c.f = logistic(1.0);
  c.d = 2.0;            // critical length 1 for the unit uniform kernel
  c.h0 = 0.25;
  c.dt = 0.1;
  c.t_max = 60.0;
  c.record_every = 1.0;
  c.u0 = [](double x) { return 0.5 * std::pow(std::cos(2.0 * M_PI * x), 2) + 0.01; };

  double ms = mu_star(c, 1.0, 0.01, 8.0, 0.15);
  CHECK(ms > 0.01);
  CHECK(ms < 8.0);
  {
    sim_config probe = c;
    probe.mu = 0.7 * ms;
    probe.t_max = 480.0;
    probe.ell_star_hint = 1.0;
    CHECK(classify_outcome(run(probe).series, 1.0) == outcome::vanishing);
    probe.mu = 1.4 * ms;
    CHECK(classify_outcome(run(probe).series, 1.0) == outcome::spreading);
  }

  CHECK(oracle::code_of([&] { mu_star(c, 1.0, 2.0, 1.0, 0.1); }) == errc::invalid_parameter);
  CHECK(oracle::code_of([&] { mu_star(c, 0.0, 0.1, 1.0, 0.1); }) == errc::invalid_parameter);
  {
    sim_config wide = c;
    wide.h0 = 0.6;  // not small against the critical length
    CHECK(oracle::code_of([&] { mu_star(wide, 1.0, 0.1, 1.0, 0.1); }) ==
          errc::invalid_parameter);
  }
  CHECK(oracle::code_of([&] { mu_star(c, 1.0, 50.0, 100.0, 0.1); }) == errc::bracket_invalid);
  {
    sim_config rushed = c;
    rushed.t_max = 0.2;
    CHECK(oracle::code_of([&] { mu_star(rushed, 1.0, 0.001, 1.0, 0.1); }) ==
          errc::undecided_budget);
  }
}

TEST_CASE("graded meshes track the uniform-lattice answer") {
  sim_config uni = base_config();
  uni.t_max = 10.0;
  run_result ru = run(uni);

  sim_config gr = base_config();
  gr.t_max = 10.0;
  gr.mesh = mesh_kind::graded;
  gr.on_record = [](const front_state& s) {
    REQUIRE(s.x.size() >= 3);
    CHECK(s.dx == 0.0);
    CHECK(s.x.front() == s.g);
    CHECK(s.x.back() == s.h);
    CHECK(s.u.front() == 0.0);
    CHECK(s.u.back() == 0.0);
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) CHECK(s.x[i] < s.x[i + 1]);
    for (double v : s.u) {
      CHECK(v >= 0.0);
      CHECK(std::isfinite(v));
    }
  };
  run_result rg = run(gr);

  CHECK(rg.final_state.h == doctest::Approx(ru.final_state.h).epsilon(0.15));
  CHECK(rg.final_state.g == doctest::Approx(ru.final_state.g).epsilon(0.15));
  for (std::size_t i = 1; i < rg.series.rows.size(); ++i) {
    CHECK(rg.series.rows[i].h >= rg.series.rows[i - 1].h);
    CHECK(rg.series.rows[i].g <= rg.series.rows[i - 1].g);
    CHECK(rg.series.rows[i].mass > 0.0);
  }
}

TEST_CASE("resuming from a checkpoint reproduces the run bit for bit") {
  sim_config c = base_config();
  c.t_max = 3.0;
  c.checkpoint_every = 0.5;

  front_state cp_state;
  std::uint64_t cp_steps = 0;
  double cp_next_record = 0.0, cp_span = 0.0;
  int fired = 0;
  c.on_checkpoint = [&](const front_state& s, std::uint64_t steps, double nr, double span) {
    if (s.t < 2.0) {  // keep an interior checkpoint, not the final one
      cp_state = s;
      cp_steps = steps;
      cp_next_record = nr;
      cp_span = span;
    }
    ++fired;
  };
  run_result full = run(c);
  REQUIRE(fired >= 4);
  REQUIRE(cp_state.x.size() >= 3);

  sim_config c2 = c;
  c2.on_checkpoint = nullptr;
  c2.checkpoint_every = 0.0;
  run_result resumed = run_from(c2, cp_state, cp_steps, cp_next_record, cp_span);

  CHECK(resumed.final_state.t == full.final_state.t);
  CHECK(resumed.final_state.g == full.final_state.g);
  CHECK(resumed.final_state.h == full.final_state.h);
  REQUIRE(resumed.final_state.x.size() == full.final_state.x.size());
  for (std::size_t i = 0; i < full.final_state.x.size(); ++i) {
    CHECK(resumed.final_state.x[i] == full.final_state.x[i]);
    CHECK(resumed.final_state.u[i] == full.final_state.u[i]);
  }
  // The resumed series is the tail segment of the full one, bitwise.
  REQUIRE(!resumed.series.rows.empty());
  std::size_t offset = full.series.rows.size() - resumed.series.rows.size();
  for (std::size_t i = 0; i < resumed.series.rows.size(); ++i) {
    const auto& a = resumed.series.rows[i];
    const auto& b = full.series.rows[offset + i];
    CHECK(a.t == b.t);
    CHECK(a.g == b.g);
    CHECK(a.h == b.h);
    CHECK(a.sup_u == b.sup_u);
    CHECK(a.mass == b.mass);
    CHECK(a.right_flux == b.right_flux);
    CHECK(a.left_flux == b.left_flux);
  }
}

TEST_CASE("height cap stops the run early") {
  sim_config c = base_config();
  c.t_max = 1e6;
  c.stop_at_h = 3.0;
  c.record_every = 1.0;
  run_result r = run(c);
  CHECK(r.final_state.h >= 3.0);
  CHECK(r.final_state.h < 3.5);
  CHECK(r.final_state.t < 1e5);
}

TEST_CASE("moving-domain validation errors") {
  using oracle::code_of;
  {
    sim_config c = base_config();
    c.u0 = nullptr;
    CHECK(code_of([&] { run(c); }) == errc::invalid_parameter);
  }
  {
    sim_config c = base_config();
    c.u0 = [](double) { return -0.1; };
    CHECK(code_of([&] { run(c); }) == errc::invalid_parameter);
  }
  {
    sim_config c = base_config();
    c.dx = 5.0;  // cannot resolve the kernel core
    CHECK(code_of([&] { run(c); }) == errc::invalid_parameter);
  }
  {
    sim_config c = base_config();
    c.dt = 0.5;  // dt (d + Lip f) = 1 > 0.9
    CHECK(code_of([&] { run(c); }) == errc::stability_violation);
  }
  {
    sim_config c = base_config();
    c.h0 = -1.0;
    CHECK(code_of([&] { run(c); }) == errc::invalid_parameter);
  }
}
