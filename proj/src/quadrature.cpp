#include "nlfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlfront {

std::vector<double> trapezoid_weights(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("trapezoid_weights: need at least 2 nodes");
  std::vector<double> w(n, 0.0);
  w[0] = 0.5 * (xs[1] - xs[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (xs[i + 1] - xs[i - 1]);
  w[n - 1] = 0.5 * (xs[n - 1] - xs[n - 2]);
  return w;
}

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    acc += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
  return acc;
}

namespace {

double simpson_panel(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm) {
  (void)m;
  (void)f;
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_panel(f, a, fa, m, fm, lm, flm);
  double right = simpson_panel(f, m, fm, b, fb, rm, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = simpson_panel(f, a, fa, b, fb, m, fm);
  return sign * adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

min_result golden_section_min(const std::function<double(double)>& f, double a, double b,
                              double xtol, int max_iter) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(xm);
  if (f1 < fm && f1 <= f2) return {x1, f1};
  if (f2 < fm) return {x2, f2};
  return {xm, fm};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double xtol,
                   int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_root: endpoints do not bracket a sign change");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double integrate_piecewise_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double a, double b) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("integrate_piecewise_linear: bad table");
  if (a > b) return -integrate_piecewise_linear(xs, ys, b, a);
  a = std::max(a, xs.front());
  b = std::min(b, xs.back());
  if (a >= b) return 0.0;
  auto value_at = [&](std::size_t seg, double x) {
    double t = (x - xs[seg]) / (xs[seg + 1] - xs[seg]);
    return ys[seg] + t * (ys[seg + 1] - ys[seg]);
  };
  // First segment whose right end is beyond a.
  std::size_t seg = static_cast<std::size_t>(
      std::upper_bound(xs.begin(), xs.end(), a) - xs.begin());
  if (seg > 0) --seg;
  if (seg + 1 >= xs.size()) seg = xs.size() - 2;
  double acc = 0.0;
  double x0 = a;
  while (x0 < b) {
    double x1 = std::min(b, xs[seg + 1]);
    acc += 0.5 * (value_at(seg, x0) + value_at(seg, x1)) * (x1 - x0);
    x0 = x1;
    if (seg + 2 < xs.size()) ++seg;
  }
  return acc;
}

}  // namespace nlfront
