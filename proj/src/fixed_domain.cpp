#include "nlfront/fixed_domain.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "nlfront/errors.hpp"
#include "nlfront/parallel.hpp"

namespace nlfront {

namespace {

constexpr int k_ell_star_min_nodes = 129;
constexpr int k_ell_star_max_nodes = 4097;

}  // namespace

double operator_disc::entry(int i, int j) const {
  double v = d * jrow[static_cast<std::size_t>(i - j + n - 1)] * weights[static_cast<std::size_t>(j)];
  if (i == j) {
    v += f0 - d;
    if (c > 0.0 && i < n - 1) v -= c / dx;
    if (c < 0.0 && i > 0) v += c / dx;
  }
  if (c > 0.0 && j == i + 1) v += c / dx;
  if (c < 0.0 && j == i - 1) v -= c / dx;
  return v;
}

void operator_disc::convolve(const std::vector<double>& x, std::vector<double>& y) const {
  const std::size_t nn = static_cast<std::size_t>(n);
  assert(x.size() == nn);
  y.resize(nn);
  std::vector<double> wx(nn);
  for (std::size_t j = 0; j < nn; ++j) wx[j] = weights[j] * x[j];
  const double* row = jrow.data() + (n - 1);
  auto do_rows = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      const double* r = row + i;
      for (std::size_t j = 0; j < nn; ++j) acc += r[-static_cast<std::ptrdiff_t>(j)] * wx[j];
      y[i] = acc;
    }
  };
  if (nn >= 768) {
    std::size_t blocks = static_cast<std::size_t>(std::min(worker_count(), 16));
    parallel_for(blocks, [&](std::size_t b) {
      std::size_t lo = nn * b / blocks;
      std::size_t hi = nn * (b + 1) / blocks;
      do_rows(lo, hi);
    });
  } else {
    do_rows(0, nn);
  }
}

void operator_disc::apply(const std::vector<double>& x, std::vector<double>& y) const {
  convolve(x, y);
  const std::size_t nn = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < nn; ++i) y[i] = d * y[i] + (f0 - d) * x[i];
  if (c > 0.0) {
    double r = c / dx;
    for (std::size_t i = 0; i + 1 < nn; ++i) y[i] += r * (x[i + 1] - x[i]);
  } else if (c < 0.0) {
    double r = c / dx;
    for (std::size_t i = 1; i < nn; ++i) y[i] += r * (x[i] - x[i - 1]);
  }
}

operator_disc assemble(const kernel& k, double d, double c, double f0, interval iv, int n) {
  if (!(iv.lo < iv.hi)) fail(errc::interval_empty, "interval has nonpositive length");
  if (n < 8) fail(errc::invalid_parameter, "need at least 8 nodes");
  if (!(d > 0.0) || !std::isfinite(d)) fail(errc::invalid_parameter, "d must be positive");
  if (!std::isfinite(c) || !std::isfinite(f0))
    fail(errc::invalid_parameter, "drift speed and f0 must be finite");

  operator_disc op;
  op.iv = iv;
  op.n = n;
  op.d = d;
  op.c = c;
  op.f0 = f0;
  op.dx = iv.length() / static_cast<double>(n - 1);
  op.nodes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) op.nodes[static_cast<std::size_t>(i)] = iv.lo + op.dx * i;
  op.jrow.resize(static_cast<std::size_t>(2 * n - 1));
  for (int m = -(n - 1); m <= n - 1; ++m)
    op.jrow[static_cast<std::size_t>(m + n - 1)] = k(op.dx * m);
  op.weights.assign(static_cast<std::size_t>(n), op.dx);
  op.weights.front() = 0.5 * op.dx;
  op.weights.back() = 0.5 * op.dx;
  return op;
}

eigen_result principal_eigenvalue(const operator_disc& op, double tol, int max_iter) {
  if (!(tol > 0.0)) fail(errc::invalid_parameter, "tolerance must be positive");
  const std::size_t n = static_cast<std::size_t>(op.n);
  // Shift that makes A + sI entrywise nonnegative with a positive diagonal, so
  // a positive start vector stays positive and the power iteration converges
  // to the rightmost eigenvalue.
  const double s =
      op.d + std::abs(op.f0) + std::abs(op.c) * static_cast<double>(op.n) / op.iv.length();

  std::vector<double> v(n, 1.0), y(n);
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    op.apply(v, y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += v[i] * y[i];
      den += v[i] * v[i];
    }
    lambda = num / den;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(y[i] - lambda * v[i]));
    if (res <= tol) {
      eigen_result out;
      out.iv = op.iv;
      out.n = op.n;
      out.lambda_p = lambda;
      out.eigenfunction = v;
      out.iterations = it;
      out.residual = res;
      return out;
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += s * v[i];
      sup = std::max(sup, std::abs(y[i]));
    }
    if (!(sup > 0.0) || !std::isfinite(sup))
      fail(errc::no_convergence, "power iteration produced a degenerate iterate");
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / sup;
  }
  fail(errc::no_convergence, "power iteration did not reach the requested residual");
}

namespace {

double lambda_for_length(const kernel& k, double d, double f0, double length) {
  double target_dx = k.core_width() / 32.0;
  int n = static_cast<int>(std::ceil(length / target_dx)) + 1;
  n = std::clamp(n, k_ell_star_min_nodes, k_ell_star_max_nodes);
  operator_disc op = assemble(k, d, 0.0, f0, interval{-0.5 * length, 0.5 * length}, n);
  return principal_eigenvalue(op, 1e-8).lambda_p;
}

}  // namespace

double ell_star(const kernel& k, double d, double f0, double tol) {
  if (!(d > 0.0) || !(f0 > 0.0))
    fail(errc::invalid_parameter, "ell_star needs d > 0 and f0 > 0");
  if (!(tol > 0.0)) fail(errc::invalid_parameter, "tolerance must be positive");
  auto right = c_star(k, d, f0, direction::right);
  auto left = c_star(k, d, f0, direction::left);
  if (!(right.value > 0.0) || !(left.value < 0.0))
    fail(errc::bracket_failure,
         "kernel pushes mass one way only; the critical length is undefined");
  if (d <= f0) return 0.0;

  double lo = std::max(k.core_width() / 16.0, 1e-3);
  for (int tries = 0; tries < 12 && lambda_for_length(k, d, f0, lo) >= 0.0; ++tries) lo *= 0.25;
  if (lambda_for_length(k, d, f0, lo) >= 0.0)
    fail(errc::bracket_failure, "no length with negative principal eigenvalue found");

  double hi = std::max(k.core_width(), 2.0 * lo);
  while (lambda_for_length(k, d, f0, hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e7)
      fail(errc::bracket_failure,
           "principal eigenvalue stays nonpositive out to length 1e7");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (lambda_for_length(k, d, f0, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

fixed_trajectory evolve_fixed(const kernel& k, const reaction& f, double d, interval iv,
                              const std::vector<double>& u0, double t_end, double dt) {
  int n = static_cast<int>(u0.size());
  if (n < 8) fail(errc::invalid_parameter, "need at least 8 nodes");
  if (!(dt > 0.0) || !(t_end > 0.0))
    fail(errc::invalid_parameter, "dt and t_end must be positive");
  double sup0 = 0.0;
  for (double v : u0) {
    if (!(v >= 0.0)) fail(errc::invalid_parameter, "initial data must be nonnegative");
    sup0 = std::max(sup0, v);
  }
  double bound = std::max(sup0, f.k0());
  if (dt * (d + f.lipschitz(bound)) >= 1.0)
    fail(errc::stability_violation, "dt * (d + Lip f) must stay below 1");
  operator_disc op = assemble(k, d, 0.0, 0.0, iv, n);

  fixed_trajectory out;
  out.nodes = op.nodes;
  out.times.push_back(0.0);
  out.sup_u.push_back(sup0);
  std::vector<double> u = u0, conv;
  long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  for (long s = 0; s < steps; ++s) {
    op.convolve(u, conv);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
      std::size_t ii = static_cast<std::size_t>(i);
      double v = u[ii];
      double next = v * (1.0 - dt * d) + dt * f(v) + dt * d * conv[ii];
      if (!(next >= 0.0) || !std::isfinite(next))
        fail(errc::stability_violation, "time step broke positivity of the update");
      u[ii] = next;
      sup = std::max(sup, next);
    }
    if (sup > bound + 0.05) fail(errc::blow_up, "solution exceeded its a priori bound");
    out.times.push_back(dt * static_cast<double>(s + 1));
    out.sup_u.push_back(sup);
  }
  out.final_u = u;
  return out;
}

}  // namespace nlfront
