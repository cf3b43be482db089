#include "nlfront/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "nlfront/errors.hpp"
#include "nlfront/parallel.hpp"
#include "nlfront/quadrature.hpp"

namespace nlfront {

namespace {

constexpr double k_blow_up_slack = 0.05;
constexpr double k_negative_clamp = 1e-12;  // corrector rounding allowance

void check_state(const front_state& st) {
  std::size_t m = st.x.size();
  if (m < 3 || st.u.size() != m)
    fail(errc::invalid_parameter, "state needs matching x/u with at least one interior node");
  if (!(st.x.front() == st.g) || !(st.x.back() == st.h))
    fail(errc::invalid_parameter, "end nodes must sit exactly on the fronts");
  if (st.u.front() != 0.0 || st.u.back() != 0.0)
    fail(errc::invalid_parameter, "front nodes must carry zero density");
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (!(st.x[i] < st.x[i + 1]))
      fail(errc::invalid_parameter, "node positions must increase strictly");
}

// Index window of nodes within `radius` of `center`.
std::pair<std::size_t, std::size_t> window(const std::vector<double>& x, double center,
                                           double radius) {
  if (!(radius < x.back() - x.front()))
    return {0, x.size()};
  auto lo = std::lower_bound(x.begin(), x.end(), center - radius);
  auto hi = std::upper_bound(x.begin(), x.end(), center + radius);
  return {static_cast<std::size_t>(lo - x.begin()), static_cast<std::size_t>(hi - x.begin())};
}

// (J * u)(x_i) at every interior node, trapezoid quadrature over (g, h).
void convolve_state(const front_state& st, const kernel& k, const std::vector<double>& w,
                    const std::vector<double>& u, const std::vector<double>* jmat,
                    std::vector<double>& conv) {
  const std::size_t m = st.x.size();
  conv.assign(m, 0.0);
  std::vector<double> wu(m);
  for (std::size_t j = 0; j < m; ++j) wu[j] = w[j] * u[j];

  auto run_rows = [&](std::size_t lo, std::size_t hi, auto&& row_fn) {
    std::size_t count = hi - lo;
    if (count >= 4096) {
      std::size_t blocks = static_cast<std::size_t>(std::min(worker_count(), 16));
      parallel_for(blocks, [&](std::size_t b) {
        std::size_t a = lo + count * b / blocks;
        std::size_t z = lo + count * (b + 1) / blocks;
        for (std::size_t i = a; i < z; ++i) row_fn(i);
      });
    } else {
      for (std::size_t i = lo; i < hi; ++i) row_fn(i);
    }
  };

  if (jmat != nullptr && jmat->size() == m * m) {
    const double* jm = jmat->data();
    run_rows(1, m - 1, [&](std::size_t i) {
      const double* row = jm + i * m;
      double acc = 0.0;
      for (std::size_t j = 1; j + 1 < m; ++j) acc += row[j] * wu[j];
      conv[i] = acc;
    });
    return;
  }

  if (st.dx > 0.0) {
    // Interior nodes sit on consecutive lattice points, so J(x_i - x_j)
    // depends only on the index difference; cache one kernel row.
    std::size_t q = m - 2;
    double mbd = k.trunc_radius() / st.dx;
    std::size_t mb = (mbd >= static_cast<double>(q - 1))
                         ? q - 1
                         : static_cast<std::size_t>(std::ceil(mbd));
    std::vector<double> jrow(2 * mb + 1);
    for (std::size_t idx = 0; idx < jrow.size(); ++idx) {
      double diff = (static_cast<double>(idx) - static_cast<double>(mb)) * st.dx;
      jrow[idx] = k(diff);
    }
    run_rows(1, m - 1, [&](std::size_t i) {
      std::size_t jlo = (i > mb) ? i - mb : 1;
      std::size_t jhi = std::min(i + mb, m - 2);
      if (jlo < 1) jlo = 1;
      double acc = 0.0;
      const double* row = jrow.data() + mb;
      for (std::size_t j = jlo; j <= jhi; ++j)
        acc += row[static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j)] * wu[j];
      conv[i] = acc;
    });
    return;
  }

  double radius = k.trunc_radius();
  run_rows(1, m - 1, [&](std::size_t i) {
    auto [jlo, jhi] = window(st.x, st.x[i], radius);
    double acc = 0.0;
    for (std::size_t j = std::max<std::size_t>(jlo, 1); j < std::min(jhi, m - 1); ++j)
      acc += k(st.x[i] - st.x[j]) * wu[j];
    conv[i] = acc;
  });
}

}  // namespace

double front_state::sup() const {
  double s = 0.0;
  for (double v : u) s = std::max(s, v);
  return s;
}

double front_state::mass() const { return trapezoid(x, u); }

const char* outcome_name(outcome o) {
  switch (o) {
    case outcome::spreading: return "Spreading";
    case outcome::vanishing: return "Vanishing";
    case outcome::undecided: return "Undecided";
  }
  return "Undecided";
}

double right_flux(const front_state& st, const kernel& k, double mu) {
  auto w = trapezoid_weights(st.x);
  auto [lo, hi] = window(st.x, st.h, k.trunc_radius());
  (void)hi;
  double acc = 0.0;
  for (std::size_t j = lo; j < st.x.size(); ++j)
    acc += w[j] * k.tail(st.h - st.x[j]) * st.u[j];
  return mu * acc;
}

double left_flux(const front_state& st, const kernel& k, double mu) {
  auto w = trapezoid_weights(st.x);
  auto [lo, hi] = window(st.x, st.g, k.trunc_radius());
  (void)lo;
  double acc = 0.0;
  for (std::size_t j = 0; j < hi; ++j)
    acc += w[j] * (1.0 - k.tail(st.g - st.x[j])) * st.u[j];
  return mu * acc;
}

front_state step(const front_state& st, const sim_config& cfg,
                 const std::vector<double>* jmat) {
  check_state(st);
  const std::size_t m = st.x.size();
  const double dt = cfg.dt, d = cfg.d;
  if (!(dt > 0.0) || !(d > 0.0)) fail(errc::invalid_parameter, "dt and d must be positive");

  double bound = cfg.u_bound > 0.0 ? cfg.u_bound : std::max(st.sup(), cfg.f.k0());
  if (dt * (d + cfg.f.lipschitz(bound)) >= 1.0)
    fail(errc::stability_violation,
         "dt * (d + Lip f) must stay below 1 to preserve positivity");

  auto w = trapezoid_weights(st.x);
  std::vector<double> conv;
  convolve_state(st, cfg.k, w, st.u, jmat, conv);

  // Positivity-preserving update order: every summand is nonnegative for
  // densities in [0, 1], and the margin 1 - dt (d + Lip f) covers the rest.
  std::vector<double> unew(m, 0.0);
  for (std::size_t i = 1; i + 1 < m; ++i)
    unew[i] = st.u[i] * (1.0 - dt * d) + dt * cfg.f(st.u[i]) + dt * d * conv[i];

  if (cfg.picard_iters > 0) {
    // Fixed-point sweeps of the implicit trapezoid corrector
    //   u+ = u + dt/2 [F(u) + F(u+)],  F(v) = d (J*v) - d v + f(v),
    // started from the explicit predictor.
    std::vector<double> f_old(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i)
      f_old[i] = d * conv[i] - d * st.u[i] + cfg.f(st.u[i]);
    std::vector<double> conv2;
    for (int sweep = 0; sweep < cfg.picard_iters; ++sweep) {
      convolve_state(st, cfg.k, w, unew, jmat, conv2);
      for (std::size_t i = 1; i + 1 < m; ++i) {
        double f_new = d * conv2[i] - d * unew[i] + cfg.f(unew[i]);
        unew[i] = st.u[i] + 0.5 * dt * (f_old[i] + f_new);
      }
    }
  }

  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    double v = unew[i];
    if (!std::isfinite(v)) fail(errc::blow_up, "density update produced a non-finite value");
    if (v < 0.0) {
      if (v < -k_negative_clamp * std::max(1.0, bound))
        fail(errc::blow_up, "density update lost positivity");
      v = 0.0;
      unew[i] = 0.0;
    }
    sup = std::max(sup, v);
  }
  if (sup > bound + k_blow_up_slack)
    fail(errc::blow_up, "solution exceeded its a priori sup bound");

  double rf = right_flux(st, cfg.k, cfg.mu);
  double lf = left_flux(st, cfg.k, cfg.mu);
  if (!(rf >= 0.0) || !(lf >= 0.0) || !std::isfinite(rf) || !std::isfinite(lf))
    fail(errc::blow_up, "front flux lost positivity or finiteness");
  double hn = st.h + dt * rf;
  double gn = st.g - dt * lf;

  front_state ns;
  ns.t = st.t + dt;
  ns.g = gn;
  ns.h = hn;
  ns.dx = st.dx;
  ns.x.reserve(m + 4);
  ns.u.reserve(m + 4);
  ns.x.push_back(gn);
  ns.u.push_back(0.0);
  if (st.dx > 0.0) {
    double dx = st.dx;
    long k_first = std::lround(st.x[1] / dx);
    long k_last = std::lround(st.x[m - 2] / dx);
    long k_lo = static_cast<long>(std::floor(gn / dx)) + 1;
    while (static_cast<double>(k_lo) * dx <= gn) ++k_lo;
    for (long q = k_lo; q < k_first; ++q) {
      ns.x.push_back(static_cast<double>(q) * dx);
      ns.u.push_back(0.0);
    }
    for (std::size_t i = 1; i + 1 < m; ++i) {
      ns.x.push_back(st.x[i]);
      ns.u.push_back(unew[i]);
    }
    long k_hi = static_cast<long>(std::ceil(hn / dx)) - 1;
    while (static_cast<double>(k_hi) * dx >= hn) --k_hi;
    for (long q = k_last + 1; q <= k_hi; ++q) {
      ns.x.push_back(static_cast<double>(q) * dx);
      ns.u.push_back(0.0);
    }
  } else {
    for (std::size_t i = 1; i + 1 < m; ++i) {
      ns.x.push_back(st.x[i]);
      ns.u.push_back(unew[i]);
    }
  }
  ns.x.push_back(hn);
  ns.u.push_back(0.0);
  return ns;
}

namespace {

std::vector<double> build_graded(double g, double h, double core) {
  double span = h - g;
  double dxm = core / 8.0;
  double cap = std::max(span / 800.0, dxm);
  double mid = 0.5 * (g + h);

  std::vector<double> xs;
  xs.push_back(g);
  {
    double gap = dxm, p = g;
    while (p + gap < mid - 0.25 * cap) {
      p += gap;
      xs.push_back(p);
      gap = std::min(gap * 1.1, cap);
    }
  }
  std::vector<double> right;
  right.push_back(h);
  {
    double gap = dxm, p = h;
    while (p - gap > mid + 0.25 * cap) {
      p -= gap;
      right.push_back(p);
      gap = std::min(gap * 1.1, cap);
    }
  }
  double a = xs.back(), b = right.back();
  int cells = std::max(1, static_cast<int>(std::ceil((b - a) / cap)));
  for (int i = 1; i < cells; ++i)
    xs.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(cells));
  for (auto it = right.rbegin(); it != right.rend(); ++it) xs.push_back(*it);
  return xs;
}

// Dual-cell average of the old piecewise-linear density on the new mesh; the
// end cells extend to the fronts so (almost) no mass is dropped.
void regrid(front_state& st, double core) {
  auto xs = build_graded(st.g, st.h, core);
  std::size_t n = xs.size();
  std::vector<double> us(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double a = (i == 1) ? st.g : 0.5 * (xs[i - 1] + xs[i]);
    double b = (i + 2 == n) ? st.h : 0.5 * (xs[i] + xs[i + 1]);
    us[i] = integrate_piecewise_linear(st.x, st.u, a, b) / (b - a);
  }
  st.x = std::move(xs);
  st.u = std::move(us);
  st.dx = 0.0;
}

// Stores the cell-averaged kernel (1/|C_j|) ∫_{C_j} J(x_i - y) dy over the
// dual cell C_j of node j, not the nodal value J(x_i - x_j): the bulk cells of
// a graded mesh are far wider than the kernel core, where nodal sampling can
// push a quadrature row sum past ∫J = 1 and break the comparison bound.  With
// cell averages the row sums telescope to the exact kernel mass over (g, h).
void fill_jmat(const front_state& st, const kernel& k, std::vector<double>& jmat) {
  std::size_t m = st.x.size();
  jmat.assign(m * m, 0.0);
  std::size_t blocks = static_cast<std::size_t>(std::min(worker_count(), 16));
  parallel_for(blocks, [&](std::size_t b) {
    std::size_t lo = m * b / blocks, hi = m * (b + 1) / blocks;
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 1; j + 1 < m; ++j) {
        double ca = 0.5 * (st.x[j - 1] + st.x[j]);
        double cb = 0.5 * (st.x[j] + st.x[j + 1]);
        jmat[i * m + j] = (k.tail(st.x[i] - cb) - k.tail(st.x[i] - ca)) / (cb - ca);
      }
  });
}

}  // namespace

run_result run_from(const sim_config& cfg, front_state st, std::uint64_t steps_done,
                    double next_record, double last_rebuild_span) {
  if (!(cfg.t_max > 0.0) || !(cfg.record_every > 0.0) || !(cfg.mu >= 0.0) ||
      !(cfg.d > 0.0) || cfg.picard_iters < 0)
    fail(errc::invalid_parameter, "bad simulation parameters");
  check_state(st);
  if (cfg.mesh == mesh_kind::uniform &&
      !(cfg.dx <= cfg.k.core_width() / 8.0 * (1.0 + 1e-12)))
    fail(errc::invalid_parameter, "dx must resolve the kernel core (dx <= core_width/8)");

  sim_config c = cfg;
  if (c.u_bound <= 0.0) c.u_bound = std::max(st.sup(), c.f.k0());
  if (c.dt * (c.d + c.f.lipschitz(c.u_bound)) > 0.9 * (1.0 + 1e-12))
    fail(errc::stability_violation, "dt exceeds the monotone bound 0.9/(d + Lip f)");

  bool use_jmat = (c.mesh == mesh_kind::graded);
  std::vector<double> jmat;
  if (use_jmat) {
    if (last_rebuild_span <= 0.0) last_rebuild_span = st.span();
    fill_jmat(st, c.k, jmat);
  }

  run_result out;
  auto record = [&](const front_state& s) {
    out.series.rows.push_back({s.t, s.g, s.h, s.sup(), s.mass(), right_flux(s, c.k, c.mu),
                               left_flux(s, c.k, c.mu)});
    if (c.on_record) c.on_record(s);
  };

  const bool hint = std::isfinite(c.ell_star_hint);
  outcome decided = outcome::undecided;

  if (st.t >= next_record - 0.5 * c.dt) {
    record(st);
    while (st.t >= next_record - 0.5 * c.dt) next_record += c.record_every;
  }
  double next_cp = 0.0;
  if (c.checkpoint_every > 0.0)
    next_cp = (std::floor(st.t / c.checkpoint_every) + 1.0) * c.checkpoint_every;

  std::uint64_t steps = steps_done;
  front_state cur = std::move(st);
  while (cur.t < c.t_max - 0.5 * c.dt && cur.h < c.stop_at_h) {
    double h_before = cur.h, g_before = cur.g;
    cur = step(cur, c, use_jmat ? &jmat : nullptr);
    ++steps;
    if (!(cur.h >= h_before) || !(cur.g <= g_before))
      fail(errc::blow_up, "front moved the wrong way");
    if (use_jmat) {
      std::size_t m = cur.x.size();
      bool need = cur.span() > 1.1 * last_rebuild_span;
      if (!need && m >= 4) {
        double rg = cur.x[m - 1] - cur.x[m - 2], ri = cur.x[m - 2] - cur.x[m - 3];
        double lg = cur.x[1] - cur.x[0], li = cur.x[2] - cur.x[1];
        need = rg > 2.0 * ri || lg > 2.0 * li;
      }
      if (need) {
        regrid(cur, c.k.core_width());
        last_rebuild_span = cur.span();
        fill_jmat(cur, c.k, jmat);
      }
    }
    if (cur.t >= next_record - 0.5 * c.dt) {
      record(cur);
      while (cur.t >= next_record - 0.5 * c.dt) next_record += c.record_every;
      if (hint) {
        decided = classify_outcome(out.series, c.ell_star_hint);
        if (decided != outcome::undecided) break;
      }
    }
    if (c.on_checkpoint && c.checkpoint_every > 0.0 && cur.t >= next_cp - 0.5 * c.dt) {
      c.on_checkpoint(cur, steps, next_record, use_jmat ? last_rebuild_span : 0.0);
      while (cur.t >= next_cp - 0.5 * c.dt) next_cp += c.checkpoint_every;
    }
  }
  if (out.series.rows.empty() || out.series.rows.back().t < cur.t - 1e-12 * (1.0 + cur.t))
    record(cur);
  out.final_state = std::move(cur);
  return out;
}

run_result run(const sim_config& cfg) {
  if (!(cfg.h0 > 0.0)) fail(errc::invalid_parameter, "h0 must be positive");
  if (!cfg.u0) fail(errc::invalid_parameter, "initial profile u0 is not set");

  front_state st;
  st.t = 0.0;
  st.g = -cfg.h0;
  st.h = cfg.h0;
  if (cfg.mesh == mesh_kind::uniform) {
    if (!(cfg.dx > 0.0)) fail(errc::invalid_parameter, "dx must be positive");
    st.dx = cfg.dx;
    long k_hi = static_cast<long>(std::ceil(cfg.h0 / cfg.dx)) - 1;
    while (static_cast<double>(k_hi) * cfg.dx >= cfg.h0) --k_hi;
    if (k_hi < 0) fail(errc::invalid_parameter, "dx too coarse for the initial domain");
    st.x.push_back(st.g);
    for (long q = -k_hi; q <= k_hi; ++q) st.x.push_back(static_cast<double>(q) * cfg.dx);
    st.x.push_back(st.h);
  } else {
    st.dx = 0.0;
    st.x = build_graded(st.g, st.h, cfg.k.core_width());
  }
  st.u.assign(st.x.size(), 0.0);
  for (std::size_t i = 1; i + 1 < st.x.size(); ++i) {
    double v = cfg.u0(st.x[i]);
    if (!std::isfinite(v) || !(v > 0.0))
      fail(errc::invalid_parameter, "u0 must be positive on the open initial domain");
    st.u[i] = v;
  }
  return run_from(cfg, std::move(st), 0, 0.0, 0.0);
}

outcome classify_outcome(const time_series& series, double ell_star_value,
                         const classify_thresholds& th) {
  if (!(ell_star_value >= 0.0) || !std::isfinite(ell_star_value))
    fail(errc::invalid_parameter, "ell_star_value must be finite and nonnegative");
  if (series.rows.size() < 2) return outcome::undecided;
  const auto& last = series.rows.back();
  double len = last.h - last.g;
  double margin = th.margin_frac * ell_star_value;
  if (len > ell_star_value + margin) return outcome::spreading;
  if (last.sup_u >= th.eps_vanish) return outcome::undecided;

  double t0 = series.rows.front().t;
  double t_cut = last.t - th.trailing_frac * (last.t - t0);
  const series_row* first_in_window = nullptr;
  for (const auto& r : series.rows) {
    if (r.t >= t_cut) {
      first_in_window = &r;
      break;
    }
  }
  if (first_in_window == nullptr || first_in_window == &last) return outcome::undecided;
  double len0 = first_in_window->h - first_in_window->g;
  double growth = (len - len0) / std::max(len0, 1e-300);
  if (growth < th.growth_tol) return outcome::vanishing;
  return outcome::undecided;
}

double mu_star(const sim_config& cfg_template, double ell_star_value, double mu_lo,
               double mu_hi, double rel_tol) {
  if (!(mu_lo > 0.0) || !(mu_hi > mu_lo) || !(rel_tol > 0.0))
    fail(errc::invalid_parameter, "need 0 < mu_lo < mu_hi and rel_tol > 0");
  if (!(ell_star_value > 0.0))
    fail(errc::invalid_parameter,
         "threshold dispersal needs d > f'(0), i.e. a positive critical length");
  if (!(cfg_template.h0 < 0.5 * ell_star_value))
    fail(errc::invalid_parameter, "mu_star needs h0 < ell_star/2");

  auto probe = [&](double mu) {
    sim_config c = cfg_template;
    c.mu = mu;
    c.ell_star_hint = ell_star_value;
    c.on_record = nullptr;
    c.on_checkpoint = nullptr;
    c.u_bound = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto r = run(c);
      auto o = classify_outcome(r.series, ell_star_value);
      if (o != outcome::undecided) return o;
      c.t_max *= 2.0;
    }
    return outcome::undecided;
  };

  outcome at_lo = probe(mu_lo);
  if (at_lo == outcome::undecided)
    fail(errc::undecided_budget, "low bracket end stayed undecided after an 8x time budget");
  outcome at_hi = probe(mu_hi);
  if (at_hi == outcome::undecided)
    fail(errc::undecided_budget, "high bracket end stayed undecided after an 8x time budget");
  if (at_lo == at_hi)
    fail(errc::bracket_invalid, std::string("both bracket ends classify as ") +
                                    outcome_name(at_lo));
  if (at_lo != outcome::vanishing)
    fail(errc::bracket_invalid, "expected vanishing at mu_lo and spreading at mu_hi");

  double lo = mu_lo, hi = mu_hi;
  while (hi - lo > rel_tol * 0.5 * (hi + lo)) {
    double mid = 0.5 * (lo + hi);
    outcome o = probe(mid);
    if (o == outcome::undecided)
      fail(errc::undecided_budget, "probe stayed undecided after an 8x time budget");
    if (o == outcome::spreading)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nlfront
