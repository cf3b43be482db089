#include "nlfront/semiwave.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "nlfront/errors.hpp"
#include "nlfront/quadrature.hpp"

namespace nlfront {

namespace {

// Rightmost half-level crossing, linearly interpolated; phi is nonincreasing
// left to right. Returns the left grid end when phi never reaches 1/2.
double anchor_of(const std::vector<double>& x, const std::vector<double>& phi) {
  std::size_t n = x.size();
  for (std::size_t i = n; i-- > 1;) {
    if (phi[i - 1] >= 0.5 && phi[i] < 0.5) {
      double drop = std::max(phi[i - 1] - phi[i], 1e-300);
      double t = (phi[i - 1] - 0.5) / drop;
      return x[i - 1] + t * (x[i] - x[i - 1]);
    }
  }
  if (phi.front() < 0.5) return x.front();
  return x.back();
}

}  // namespace

perturbed_profile iterate_p(double c, double delta, const kernel& k, const reaction& f,
                            double d, double x_depth, int n, double tol, int max_iter,
                            bool require_deep) {
  if (!(c > 0.0) || !std::isfinite(c))
    fail(errc::invalid_parameter, "speed c must be positive and finite");
  if (!(delta > 0.0) || !(delta < 1.0))
    fail(errc::invalid_parameter, "delta floor must lie in (0, 1)");
  if (!(x_depth > 0.0) || n < 16)
    fail(errc::invalid_parameter, "need positive depth and at least 16 cells");
  if (!(d > 0.0) || !(tol > 0.0) || max_iter < 1)
    fail(errc::invalid_parameter, "bad iteration parameters");

  // cM >= d + max |f'| keeps the integrand monotone in phi, which is what
  // makes the ascent from the constant delta monotone node by node.
  const double m_const = (d + f.lipschitz(2.0)) / c + 0.1;
  const double dx = x_depth / static_cast<double>(n);
  const double theta = m_const * dx;
  const double decay = std::exp(-theta);
  // Product integration of int e^{-M tau} G(tau) over one panel with G
  // linear: weights ca (left node) and cb (right node) are exact.
  double i1;
  if (theta < 1e-4)
    i1 = dx * (0.5 - theta / 3.0 + theta * theta / 8.0 - theta * theta * theta / 30.0);
  else
    i1 = (1.0 - (1.0 + theta) * decay) / (m_const * theta);
  const double i0 = -std::expm1(-theta) / m_const;
  const double ca = i0 - i1;
  const double cb = i1;

  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    x[static_cast<std::size_t>(i)] = -x_depth + dx * static_cast<double>(i);

  // Closure mass from the phi = 1 region left of -X: K(x + X) evaluated at
  // the exact offsets i*dx.
  std::vector<double> kleft(x.size());
  for (int i = 0; i <= n; ++i)
    kleft[static_cast<std::size_t>(i)] = k.tail(dx * static_cast<double>(i));

  // Exact kernel mass over the dual cell at signed node offset o = i - j.
  // Nodal sampling misweights a kernel jump that lands on the truncation
  // edge, bending the converged profile by O(dx) one kernel radius inside;
  // cell masses keep every row sum at the exact integral.
  std::vector<double> crow(2 * static_cast<std::size_t>(n) + 1);
  for (int m = -n; m <= n; ++m)
    crow[static_cast<std::size_t>(m + n)] =
        k.tail((static_cast<double>(m) - 0.5) * dx) -
        k.tail((static_cast<double>(m) + 0.5) * dx);
  double mbd = k.trunc_radius() / dx;
  std::size_t mb = (mbd >= static_cast<double>(n - 1))
                       ? static_cast<std::size_t>(n)
                       : static_cast<std::size_t>(std::ceil(mbd)) + 1;

  const std::size_t nn = x.size();
  std::vector<double> phi(nn, delta), conv(nn), gsrc(nn), next(nn);
  std::vector<double> expmx(nn);
  for (std::size_t i = 0; i < nn; ++i) expmx[i] = std::exp(m_const * x[i]);

  double min_ascent = 0.0;
  double sup_change = 0.0;
  int it = 0;
  bool converged = false;
  const double sigma_lin = c * m_const - d;
  while (it < max_iter) {
    ++it;
    // J * phi with the exact-mass decomposition phi = delta + (phi - delta):
    // the constant part integrates to exactly delta, so P[delta] >= delta to
    // rounding and the ascent is genuinely monotone.
    for (std::size_t i = 0; i < nn; ++i) {
      std::size_t jlo = (i > mb) ? i - mb : 0;
      std::size_t jhi = std::min(i + mb, nn - 1);
      double acc = 0.0;
      const double* row = crow.data() + n;
      for (std::size_t j = jlo; j <= jhi; ++j)
        acc += row[static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j)] *
               (phi[j] - delta);
      if (jlo == 0) {
        // Node 0 owns only the right half of its cell; the left half belongs
        // to the phi = 1 closure already counted through kleft.
        double di = dx * static_cast<double>(i);
        acc += (k.tail(di + 0.5 * dx) - k.tail(di)) * (phi[0] - delta);
      }
      conv[i] = delta + (1.0 - delta) * kleft[i] + acc;
    }
    for (std::size_t i = 0; i < nn; ++i)
      gsrc[i] = d * conv[i] + f(phi[i]) + sigma_lin * phi[i];

    double s = 0.0;
    double chg = 0.0;
    next[nn - 1] = delta;
    for (std::size_t i = nn - 1; i-- > 0;) {
      s = decay * s + ca * gsrc[i] + cb * gsrc[i + 1];
      double p = expmx[i] * delta + s / c;
      double asc = p - phi[i];
      if (asc < min_ascent) min_ascent = asc;
      double v = std::clamp(p, delta, 1.0);
      chg = std::max(chg, std::abs(v - phi[i]));
      next[i] = v;
    }
    phi.swap(next);
    sup_change = chg;
    if (chg < tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(errc::no_convergence,
         "profile iteration did not settle within " + std::to_string(max_iter) + " sweeps");

  double trunc_mass = std::max(k.tail(x_depth), 1.0 - k.tail(-x_depth));
  double depth_tol = std::max(10.0 * k_profile_tol, 20.0 * trunc_mass);
  bool deep = phi.front() >= 1.0 - depth_tol;
  if (require_deep && !deep)
    fail(errc::truncation_too_shallow,
         "phi(-X) stayed below the truncation tolerance; increase the depth X");

  perturbed_profile out;
  out.c = c;
  out.delta = delta;
  out.m_const = m_const;
  out.depth = x_depth;
  out.x = std::move(x);
  out.phi = std::move(phi);
  out.iterations = it;
  out.sup_change = sup_change;
  out.min_ascent = min_ascent;
  out.deep = deep;
  return out;
}

const char* wave_kind_name(wave_kind k) {
  return k == wave_kind::semi_wave ? "SemiWave" : "TravelingWave";
}

namespace {

// Solves on [-x_depth, 0] with n cells but always reports a profile sampled
// on window_n + 1 nodes spanning window_depth, so callers see one grid shape
// no matter how deep the solve had to go.  The escape test is tied to
// window_depth as well: deepening the solve domain must not move the
// classification goalpost.
bool resolve_wave(double c, const kernel& k, const reaction& f, double d,
                  const std::vector<double>& deltas, double x_depth, int n,
                  double window_depth, int window_n, wave_profile& out) {
  double prev_anchor = std::numeric_limits<double>::quiet_NaN();
  double anchor = prev_anchor;
  perturbed_profile last;
  for (double delta : deltas) {
    last = iterate_p(c, delta, k, f, d, x_depth, n, 1e-10, 200000, false);
    prev_anchor = anchor;
    anchor = anchor_of(last.x, last.phi);
    if (anchor <= -0.5 * window_depth) {
      // The half level escapes with the floor: traveling-wave regime. Keep
      // window_n + 1 nodes around the half level and shift so phi(0) = 1/2.
      out.kind = wave_kind::traveling_wave;
      out.c = c;
      out.depth = window_depth;
      std::ptrdiff_t total = static_cast<std::ptrdiff_t>(last.x.size());
      double dx = x_depth / static_cast<double>(n);
      std::ptrdiff_t ia = std::lround((anchor + x_depth) / dx);
      std::ptrdiff_t lo = ia - window_n / 2;
      lo = std::max<std::ptrdiff_t>(0, std::min(lo, total - 1 - window_n));
      out.x.resize(static_cast<std::size_t>(window_n) + 1);
      out.phi.resize(out.x.size());
      for (std::size_t i = 0; i < out.x.size(); ++i) {
        out.x[i] = last.x[static_cast<std::size_t>(lo) + i] - anchor;
        out.phi[i] = last.phi[static_cast<std::size_t>(lo) + i];
      }
      out.front_anchor = 0.0;
      return true;
    }
  }
  bool settled = !std::isnan(prev_anchor) && std::abs(anchor - prev_anchor) < 0.05;
  if (settled && last.deep) {
    out.kind = wave_kind::semi_wave;
    out.c = c;
    out.depth = window_depth;
    std::size_t lo = last.x.size() - 1 - static_cast<std::size_t>(window_n);
    out.x.assign(last.x.begin() + static_cast<std::ptrdiff_t>(lo), last.x.end());
    out.phi.assign(last.phi.begin() + static_cast<std::ptrdiff_t>(lo), last.phi.end());
    out.phi.back() = 0.0;  // the delta -> 0 limit pins phi(0) = 0
    out.front_anchor = anchor;
    return true;
  }
  return false;
}

}  // namespace

wave_profile extract_wave(double c, const kernel& k, const reaction& f, double d,
                          const std::vector<double>& delta_sequence, double x_depth, int n) {
  if (delta_sequence.empty())
    fail(errc::invalid_parameter, "need at least one delta floor");
  for (std::size_t i = 0; i < delta_sequence.size(); ++i) {
    double v = delta_sequence[i];
    if (!(v > 0.0) || !(v < 1.0) || (i > 0 && !(v < delta_sequence[i - 1])))
      fail(errc::invalid_parameter, "delta floors must decrease strictly within (0, 1)");
  }
  wave_profile out;
  if (resolve_wave(c, k, f, d, delta_sequence, x_depth, n, x_depth, n, out)) return out;
  std::vector<double> deeper = delta_sequence;
  deeper.push_back(delta_sequence.back() / 5.0);
  deeper.push_back(delta_sequence.back() / 25.0);
  if (resolve_wave(c, k, f, d, deeper, 2.0 * x_depth, 2 * n, x_depth, n, out)) return out;
  fail(errc::inconclusive,
       "half-level anchor neither settled nor escaped at doubled depth");
}

double m_of_c(const wave_profile& w, const kernel& k, double mu) {
  if (w.kind != wave_kind::semi_wave)
    fail(errc::invalid_parameter, "the flux functional takes a semi-wave profile");
  if (!k.tails().j1_plus)
    fail(errc::divergent_flux, "right tail has no first moment; the flux integral diverges");
  if (!(mu > 0.0)) fail(errc::invalid_parameter, "mu must be positive");
  auto wq = trapezoid_weights(w.x);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.x.size(); ++i)
    acc += wq[i] * k.tail(-w.x[i]) * w.phi[i];
  // phi = 1 closure beyond the grid: integral over (X, inf) of K.
  double depth = -w.x.front();
  double tail_part = k.first_moment_right() - k.integrated_tail(depth);
  acc += std::max(tail_part, 0.0);
  return mu * acc;
}

namespace {

struct probe_geometry {
  double x_depth;
  int n;
  std::vector<double> deltas;
};

}  // namespace

speed_solve find_c0(const kernel& k, const reaction& f, double d, double mu, double tol) {
  if (!k.tails().j1_plus)
    fail(errc::divergent_flux,
         "right tail has no first moment; no finite selected speed exists");
  if (!(d > 0.0) || !(mu > 0.0) || !(tol > 0.0))
    fail(errc::invalid_parameter, "need d > 0, mu > 0 and tol > 0");

  auto cs = c_star(k, d, f.f0(), direction::right);
  double x_probe = std::max(12.0, std::min(60.0, 1.25 * std::min(k.trunc_radius(), 48.0)));
  probe_geometry coarse{x_probe, static_cast<int>(std::lround(x_probe * 32.0)),
                        {0.02, 0.005, 0.001}};
  probe_geometry fine{x_probe + 4.0,
                      static_cast<int>(std::lround((x_probe + 4.0) * 128.0)),
                      {0.02, 0.005, 0.001, 1e-4}};

  speed_solve out;
  auto pval = [&](double c, const probe_geometry& pg) {
    wave_profile w = extract_wave(c, k, f, d, pg.deltas, pg.x_depth, pg.n);
    double v;
    if (w.kind == wave_kind::traveling_wave)
      v = 1.0;  // at or beyond c_star the profile detaches: P(c) > 0 there
    else
      v = c - m_of_c(w, k, mu);
    out.bracket_history.emplace_back(c, v);
    return v;
  };

  double lo = 1e-3;
  double plo = pval(lo, coarse);
  for (int t = 0; t < 3 && plo >= 0.0; ++t) {
    lo *= 0.1;
    plo = pval(lo, coarse);
  }
  if (plo >= 0.0)
    fail(errc::bracket_failure, "P(c) stayed nonnegative down to c = 1e-6");

  double cap = cs.finite ? 0.99 * cs.value : 1e6;
  double hi = std::min(std::max(0.1, 2.0 * lo), cap);
  double phi_v = pval(hi, coarse);
  while (phi_v < 0.0) {
    if (hi >= cap) {
      if (cs.finite && cap < 0.999 * cs.value) {
        cap = 0.999 * cs.value;
        hi = cap;
        phi_v = pval(hi, coarse);
        continue;
      }
      fail(errc::bracket_failure, "no speed with positive P(c) found below the cap");
    }
    hi = std::min(2.0 * hi, cap);
    phi_v = pval(hi, coarse);
  }

  double a = lo, b = hi;
  double coarse_width = std::max(0.25 * tol, 1e-6);
  while (b - a > coarse_width) {
    double mid = 0.5 * (a + b);
    if (pval(mid, coarse) < 0.0)
      a = mid;
    else
      b = mid;
  }

  // Re-bracket and finish at full resolution; the coarse root is biased by
  // its grid, so widen until the fine P changes sign.
  double c0 = 0.5 * (a + b);
  double pad = std::max(4.0 * tol, 0.01 * c0);
  double a2 = std::max(c0 - pad, 0.1 * lo);
  double b2 = std::min(c0 + pad, cap);
  double pa = pval(a2, fine);
  int guard = 0;
  while (pa >= 0.0 && guard++ < 8) {
    a2 = std::max(0.5 * a2, 1e-7);
    pa = pval(a2, fine);
  }
  if (pa >= 0.0) fail(errc::bracket_failure, "fine re-bracket failed from below");
  double pb = pval(b2, fine);
  guard = 0;
  while (pb < 0.0 && guard++ < 8) {
    if (b2 >= cap) fail(errc::bracket_failure, "fine re-bracket failed from above");
    b2 = std::min(2.0 * b2, cap);
    pb = pval(b2, fine);
  }
  while (b2 - a2 > 0.5 * tol) {
    double mid = 0.5 * (a2 + b2);
    if (pval(mid, fine) < 0.0)
      a2 = mid;
    else
      b2 = mid;
  }
  c0 = 0.5 * (a2 + b2);

  wave_profile w = extract_wave(c0, k, f, d, fine.deltas, fine.x_depth, fine.n);
  if (w.kind != wave_kind::semi_wave)
    fail(errc::no_convergence, "root polish landed outside the semi-wave regime");
  out.c0 = c0;
  out.m_at_c0 = m_of_c(w, k, mu);
  out.residual = std::abs(c0 - out.m_at_c0);
  return out;
}

speed_solve find_c0_left(const kernel& k, const reaction& f, double d, double mu,
                         double tol) {
  return find_c0(reflect(k), f, d, mu, tol);
}

double residual(const wave_profile& w, const kernel& k, const reaction& f, double d) {
  const auto& x = w.x;
  const auto& phi = w.phi;
  std::size_t nn = x.size();
  if (nn < 3) fail(errc::invalid_parameter, "profile too short");
  double dx = x[1] - x[0];
  double left_end = x.front();
  double radius = k.trunc_radius();
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < nn; ++i) {
    double acc = k.tail(x[i] - left_end);  // phi = 1 closure left of the grid
    std::size_t jlo = 0, jhi = nn;
    if (radius < x.back() - x.front()) {
      auto lb = std::lower_bound(x.begin(), x.end(), x[i] - radius - dx);
      auto ub = std::upper_bound(x.begin(), x.end(), x[i] + radius + dx);
      jlo = static_cast<std::size_t>(lb - x.begin());
      jhi = static_cast<std::size_t>(ub - x.begin());
    }
    // Exact kernel mass per dual cell instead of nodal samples: where a
    // kernel jump crosses the stencil a nodal trapezoid leaves O(dx) spikes,
    // drowning the O(dx^2) truncation error this residual is meant to expose.
    for (std::size_t j = jlo; j < jhi; ++j) {
      double ca = (j == 0) ? x[0] : 0.5 * (x[j - 1] + x[j]);
      double cb = (j + 1 == nn) ? x[nn - 1] : 0.5 * (x[j] + x[j + 1]);
      acc += (k.tail(x[i] - cb) - k.tail(x[i] - ca)) * phi[j];
    }
    double dphi = (phi[i + 1] - phi[i - 1]) / (2.0 * dx);
    double r = d * acc - d * phi[i] + w.c * dphi + f(phi[i]);
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

}  // namespace nlfront
