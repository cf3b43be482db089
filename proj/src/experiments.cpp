#include "nlfront/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "nlfront/errors.hpp"
#include "nlfront/io.hpp"
#include "nlfront/parallel.hpp"

namespace nlfront {

namespace {

struct ols_line {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
};

ols_line fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) fail(errc::window_too_short, "regression abscissae are degenerate");
  ols_line out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ys[i] - (out.intercept + out.slope * xs[i]);
    ssr += r * r;
  }
  out.r2 = (syy > 0.0) ? 1.0 - ssr / syy : 1.0;
  out.stderr_slope =
      (n > 2) ? std::sqrt((ssr / static_cast<double>(n - 2)) / sxx) : 0.0;
  return out;
}

double window_start(const time_series& series, double window_frac) {
  if (!(window_frac > 0.0) || !(window_frac < 1.0))
    fail(errc::invalid_parameter, "window fraction must lie in (0, 1)");
  if (series.rows.empty()) fail(errc::window_too_short, "empty series");
  double t0 = series.rows.front().t;
  double t_hi = series.rows.back().t;
  return t_hi - window_frac * (t_hi - t0);
}

}  // namespace

speed_fit estimate_speed(const time_series& series, double window_frac, direction dir) {
  double t_lo = window_start(series, window_frac);
  std::vector<double> ts, ys;
  for (const auto& r : series.rows) {
    if (r.t < t_lo - 1e-12) continue;
    ts.push_back(r.t);
    ys.push_back(dir == direction::right ? r.h : -r.g);
  }
  if (ts.size() < 10)
    fail(errc::window_too_short,
         "need at least 10 records in the trailing window, have " +
             std::to_string(ts.size()));
  ols_line line = fit_line(ts, ys);
  speed_fit out;
  out.speed = line.slope;
  out.intercept = line.intercept;
  out.stderr_speed = line.stderr_slope;
  out.t_lo = ts.front();
  out.t_hi = ts.back();
  out.n_points = static_cast<int>(ts.size());
  return out;
}

const char* accel_model_name(accel_model m) {
  switch (m) {
    case accel_model::power_law: return "power";
    case accel_model::t_log: return "t_log";
    case accel_model::exp_root: return "exp_root";
  }
  return "unknown";
}

accel_fit fit_acceleration(const time_series& series, accel_model model,
                           double window_frac, double beta) {
  double t_lo = window_start(series, window_frac);
  std::vector<double> ts, hs;
  for (const auto& r : series.rows) {
    if (r.t <= 1.5 || r.t < t_lo - 1e-12) continue;
    if (!(r.h > 0.0))
      fail(errc::invalid_parameter, "right front must be positive for growth fits");
    ts.push_back(r.t);
    hs.push_back(r.h);
  }
  if (ts.size() < 10)
    fail(errc::window_too_short,
         "need at least 10 usable records, have " + std::to_string(ts.size()));

  accel_fit out;
  out.model = model;
  out.n_points = static_cast<int>(ts.size());
  if (model == accel_model::power_law) {
    std::vector<double> xs(ts.size()), ys(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      xs[i] = std::log(ts[i]);
      ys[i] = std::log(hs[i]);
    }
    ols_line line = fit_line(xs, ys);
    out.exponent = line.slope;
    out.coefficient = std::exp(line.intercept);
    out.r2 = line.r2;
  } else if (model == accel_model::exp_root) {
    if (!(beta > 1.0)) fail(errc::invalid_parameter, "exp_root needs beta > 1");
    std::vector<double> xs(ts.size()), ys(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      xs[i] = std::pow(ts[i], 1.0 / beta);
      ys[i] = std::log(hs[i]);
    }
    ols_line line = fit_line(xs, ys);
    out.exponent = 1.0 / beta;
    out.coefficient = line.slope;
    out.r2 = line.r2;
  } else {
    double mean = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) mean += hs[i] / (ts[i] * std::log(ts[i]));
    mean /= static_cast<double>(ts.size());
    out.exponent = 1.0;
    out.coefficient = mean;
    double ssr = 0.0, syy = 0.0, mh = 0.0;
    for (double h : hs) mh += h;
    mh /= static_cast<double>(hs.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      double pred = mean * ts[i] * std::log(ts[i]);
      ssr += (hs[i] - pred) * (hs[i] - pred);
      syy += (hs[i] - mh) * (hs[i] - mh);
    }
    out.r2 = (syy > 0.0) ? 1.0 - ssr / syy : 1.0;
  }
  if (out.r2 < 0.9)
    fail(errc::model_mismatch, std::string("poor fit for model ") +
                                   accel_model_name(model) +
                                   ": r2 = " + format_g(out.r2));
  return out;
}

namespace {

double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
  // Fixed 53-bit mantissa construction so the stream does not depend on the
  // standard library's distribution internals.
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

comparison_report comparison_harness(const sim_config& base, int n_pairs,
                                     std::uint64_t seed) {
  if (n_pairs < 1) fail(errc::invalid_parameter, "need at least one pair");
  if (base.mesh != mesh_kind::uniform)
    fail(errc::invalid_parameter, "the harness compares runs on a shared uniform lattice");
  if (!(base.h0 > 0.0) || !(base.dx > 0.0))
    fail(errc::invalid_parameter, "base configuration lacks a lattice");

  comparison_report report;
  report.pairs.resize(static_cast<std::size_t>(n_pairs));

  parallel_for(static_cast<std::size_t>(n_pairs), [&](std::size_t p) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (p + 1)));
    double a1 = draw_uniform(rng, 0.3, 1.0);
    double a2 = draw_uniform(rng, 0.3, 1.0);
    double m1 = draw_uniform(rng, 0.3, 1.5);
    double m2 = draw_uniform(rng, 0.3, 1.5);
    pair_outcome& po = report.pairs[p];
    po.amp_lo = std::min(a1, a2);
    po.amp_hi = std::max(a1, a2);
    po.mu_lo = std::min(m1, m2);
    po.mu_hi = std::max(m1, m2);

    double h0 = base.h0;
    auto bump = [h0](double amp) {
      return [amp, h0](double x) {
        double c = std::cos(0.5 * M_PI * x / h0);
        return amp * c * c;
      };
    };
    double bound = std::max(po.amp_hi, base.f.k0());

    std::vector<front_state> lo_states, hi_states;
    sim_config lo_cfg = base;
    lo_cfg.mu = po.mu_lo;
    lo_cfg.u0 = bump(po.amp_lo);
    lo_cfg.u_bound = bound;
    lo_cfg.on_record = [&](const front_state& st) { lo_states.push_back(st); };
    lo_cfg.on_checkpoint = nullptr;
    lo_cfg.checkpoint_every = 0.0;
    sim_config hi_cfg = lo_cfg;
    hi_cfg.mu = po.mu_hi;
    hi_cfg.u0 = bump(po.amp_hi);
    hi_cfg.on_record = [&](const front_state& st) { hi_states.push_back(st); };

    run(lo_cfg);
    run(hi_cfg);

    auto blame = [&](const std::string& what) { po.violations.push_back(what); };
    if (lo_states.size() != hi_states.size())
      blame("record count mismatch: " + std::to_string(lo_states.size()) + " vs " +
            std::to_string(hi_states.size()));
    std::size_t n_rec = std::min(lo_states.size(), hi_states.size());
    po.records_compared = static_cast<int>(n_rec);
    const double slack = 1e-12;
    for (std::size_t r = 0; r < n_rec; ++r) {
      const front_state& sl = lo_states[r];
      const front_state& sh = hi_states[r];
      std::string at = " at t = " + format_g(sl.t) + " (pair " + std::to_string(p) + ")";
      if (std::abs(sl.t - sh.t) > 1e-9) {
        blame("record times diverged" + at);
        continue;
      }
      if (sh.h < sl.h - slack) blame("right fronts out of order" + at);
      if (sh.g > sl.g + slack) blame("left fronts out of order" + at);
      // Interior lattice nodes sit on integer multiples of dx in both runs.
      long k_lo_hi = std::llround(sh.x[1] / base.dx);
      for (std::size_t i = 1; i + 1 < sl.x.size(); ++i) {
        double ul = sl.u[i];
        if (!(ul >= 0.0)) {
          blame("negative density in the smaller run" + at);
          break;
        }
        if (ul > bound + 1e-9) {
          blame("density above the a priori bound in the smaller run" + at);
          break;
        }
        long kk = std::llround(sl.x[i] / base.dx);
        std::size_t j = static_cast<std::size_t>(1 + (kk - k_lo_hi));
        if (j + 1 >= sh.x.size() || std::abs(sh.x[j] - sl.x[i]) > 1e-9) {
          blame("lattice nodes failed to align" + at);
          break;
        }
        if (sh.u[j] < ul - slack) {
          blame("densities out of order at x = " + format_g(sl.x[i]) + at);
          break;
        }
      }
      for (std::size_t i = 1; i + 1 < sh.x.size(); ++i) {
        if (!(sh.u[i] >= 0.0)) {
          blame("negative density in the larger run" + at);
          break;
        }
        if (sh.u[i] > bound + 1e-9) {
          blame("density above the a priori bound in the larger run" + at);
          break;
        }
      }
    }
  });

  for (const auto& po : report.pairs)
    report.total_violations += static_cast<int>(po.violations.size());
  return report;
}

double bulk_deviation(const front_state& st, double level, double eps) {
  if (!(eps >= 0.0) || !(eps < 1.0))
    fail(errc::invalid_parameter, "eps must lie in [0, 1)");
  double lo = (1.0 - eps) * st.g;
  double hi = (1.0 - eps) * st.h;
  double sup = -1.0;
  for (std::size_t i = 0; i < st.x.size(); ++i) {
    if (st.x[i] < lo || st.x[i] > hi) continue;
    sup = std::max(sup, std::abs(st.u[i] - level));
  }
  if (sup < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sup;
}

}  // namespace nlfront
