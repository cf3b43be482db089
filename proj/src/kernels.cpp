#include "nlfront/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nlfront/errors.hpp"
#include "nlfront/quadrature.hpp"

namespace nlfront {

namespace {

constexpr double k_mass_tol = 1e-8;
constexpr double k_radius_cap = 1e300;
const double k_inf = std::numeric_limits<double>::infinity();
const double k_nan = std::numeric_limits<double>::quiet_NaN();

// Simpson value of f over [u, v] using the midpoint.
double simpson_panel(const std::function<double(double)>& f, double u, double v) {
  return (v - u) / 6.0 * (f(u) + 4.0 * f(0.5 * (u + v)) + f(v));
}

// Cubic Hermite interpolant on a uniform grid with stored node derivatives;
// exact values and slopes at nodes keep the J/K/IK tables mutually
// consistent to O(dx^4).
struct hermite_table {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> v;  // values
  std::vector<double> m;  // derivatives

  double eval(double x) const {
    if (x <= x0) return v.front();
    double xm = x0 + dx * static_cast<double>(v.size() - 1);
    if (x >= xm) return v.back();
    auto i = static_cast<std::size_t>((x - x0) / dx);
    if (i + 1 >= v.size()) i = v.size() - 2;
    double t = (x - (x0 + dx * static_cast<double>(i))) / dx;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * v[i] + h10 * dx * m[i] + h01 * v[i + 1] + h11 * dx * m[i + 1];
  }
};

}  // namespace

namespace detail {

class kernel_base {
 public:
  virtual ~kernel_base() = default;
  virtual double j(double x) const = 0;
  virtual double tail(double z) const = 0;             // K(z)
  virtual double integrated_tail(double w) const = 0;  // int_0^w K
  virtual double mgf(double nu) const = 0;
  virtual double ik_limit() const = 0;  // int_0^inf K; +inf when divergent
  virtual double sup_j() const = 0;
  virtual double core_width() const = 0;
  virtual double radius_for(double mass_tol) const = 0;
  virtual tail_class tails() const = 0;
  // x -> j(-x); nullptr signals a symmetric base that is its own reflection.
  virtual std::shared_ptr<const kernel_base> flipped() const { return nullptr; }
};

namespace {

class symmetric_base : public kernel_base {
 public:
  double tail(double z) const final {
    if (z >= 0.0) return tail_pos(z);
    return 1.0 - tail_pos(-z);
  }
  double integrated_tail(double w) const final {
    if (w >= 0.0) return ik_pos(w);
    return w + ik_pos(-w);
  }
  double mgf(double nu) const final { return mgf_abs(std::abs(nu)); }
  double radius_for(double mass_tol) const override {
    double target = 0.5 * mass_tol;
    double hi = std::max(core_width(), 1.0);
    while (tail_pos(hi) > target) {
      hi *= 2.0;
      if (hi >= k_radius_cap) return k_radius_cap;
    }
    if (tail_pos(0.5 * hi) <= target) return 0.5 * hi;
    double r = bisect_root([&](double z) { return tail_pos(z) - target; }, 0.5 * hi, hi,
                           1e-12 * hi);
    return r * (1.0 + 1e-9);
  }

 protected:
  virtual double tail_pos(double z) const = 0;  // z >= 0
  virtual double ik_pos(double w) const = 0;    // w >= 0
  virtual double mgf_abs(double nu) const = 0;  // nu >= 0
};

class uniform_base final : public symmetric_base {
 public:
  explicit uniform_base(double a) : a_(a) {}
  double j(double x) const override {
    double ax = std::abs(x);
    if (ax < a_) return 0.5 / a_;
    if (ax == a_) return 0.25 / a_;
    return 0.0;
  }
  double sup_j() const override { return 0.5 / a_; }
  double core_width() const override { return a_; }
  double radius_for(double) const override { return a_; }
  double ik_limit() const override { return 0.25 * a_; }
  tail_class tails() const override { return {}; }

 protected:
  double tail_pos(double z) const override { return z >= a_ ? 0.0 : (a_ - z) / (2.0 * a_); }
  double ik_pos(double w) const override {
    if (w >= a_) return 0.25 * a_;
    return (a_ * w - 0.5 * w * w) / (2.0 * a_);
  }
  double mgf_abs(double nu) const override {
    double x = nu * a_;
    if (x < 1e-4) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
  }

 private:
  double a_;
};

class triangular_base final : public symmetric_base {
 public:
  explicit triangular_base(double a) : a_(a) {}
  double j(double x) const override {
    double ax = std::abs(x);
    return ax >= a_ ? 0.0 : (a_ - ax) / (a_ * a_);
  }
  double sup_j() const override { return 1.0 / a_; }
  double core_width() const override { return a_; }
  double radius_for(double) const override { return a_; }
  double ik_limit() const override { return a_ / 6.0; }
  tail_class tails() const override { return {}; }

 protected:
  double tail_pos(double z) const override {
    if (z >= a_) return 0.0;
    double r = a_ - z;
    return r * r / (2.0 * a_ * a_);
  }
  double ik_pos(double w) const override {
    if (w >= a_) return a_ / 6.0;
    double r = a_ - w;
    return (a_ * a_ * a_ - r * r * r) / (6.0 * a_ * a_);
  }
  double mgf_abs(double nu) const override {
    double x = nu * a_;
    if (x < 1e-4) return 1.0 + x * x / 12.0;
    return 2.0 * (std::cosh(x) - 1.0) / (x * x);
  }

 private:
  double a_;
};

constexpr double k_inv_sqrt_2pi = 0.3989422804014327;

class gaussian_base final : public symmetric_base {
 public:
  explicit gaussian_base(double s) : s_(s) {}
  double j(double x) const override {
    double t = x / s_;
    return k_inv_sqrt_2pi / s_ * std::exp(-0.5 * t * t);
  }
  double sup_j() const override { return k_inv_sqrt_2pi / s_; }
  double core_width() const override { return s_; }
  double ik_limit() const override { return s_ * k_inv_sqrt_2pi; }
  tail_class tails() const override { return {}; }

 protected:
  double tail_pos(double z) const override { return 0.5 * std::erfc(z / (s_ * std::sqrt(2.0))); }
  double ik_pos(double w) const override {
    double t = w / s_;
    double phi = k_inv_sqrt_2pi * std::exp(-0.5 * t * t);
    return w * tail_pos(w) + s_ * (k_inv_sqrt_2pi - phi);
  }
  double mgf_abs(double nu) const override {
    double x = nu * s_;
    return std::exp(0.5 * x * x);
  }

 private:
  double s_;
};

class laplace_base final : public symmetric_base {
 public:
  explicit laplace_base(double b) : b_(b) {}
  double j(double x) const override { return std::exp(-std::abs(x) / b_) / (2.0 * b_); }
  double sup_j() const override { return 0.5 / b_; }
  double core_width() const override { return b_; }
  double radius_for(double mass_tol) const override {
    return b_ * (std::log(1.0 / mass_tol) + 1e-6);
  }
  double ik_limit() const override { return 0.5 * b_; }
  tail_class tails() const override { return {}; }

 protected:
  double tail_pos(double z) const override { return 0.5 * std::exp(-z / b_); }
  double ik_pos(double w) const override { return -0.5 * b_ * std::expm1(-w / b_); }
  double mgf_abs(double nu) const override {
    double x = nu * b_;
    if (x >= 1.0) return k_inf;
    return 1.0 / (1.0 - x * x);
  }

 private:
  double b_;
};

class bump_base final : public symmetric_base {
 public:
  explicit bump_base(double a) : a_(a) {
    auto profile = [](double t) {
      double d = 1.0 - t * t;
      return d <= 0.0 ? 0.0 : std::exp(-1.0 / d);
    };
    double i0 = adaptive_simpson(profile, -1.0, 1.0, 1e-14, 50);
    c_ = 1.0 / (a_ * i0);
    build_tables();
  }
  double j(double x) const override {
    double t = x / a_;
    double d = 1.0 - t * t;
    return d <= 0.0 ? 0.0 : c_ * std::exp(-1.0 / d);
  }
  double sup_j() const override { return c_ * std::exp(-1.0); }
  double core_width() const override { return a_; }
  double radius_for(double) const override { return a_; }
  double ik_limit() const override { return ik_.v.back(); }
  tail_class tails() const override { return {}; }

 protected:
  double tail_pos(double z) const override { return z >= a_ ? 0.0 : k_.eval(z); }
  double ik_pos(double w) const override {
    return w >= a_ ? ik_.v.back() : ik_.eval(w);
  }
  double mgf_abs(double nu) const override {
    if (nu * a_ > 700.0) return k_inf;
    auto f = [&](double x) { return j(x) * std::exp(nu * x); };
    double scale = std::exp(nu * a_);
    double m = adaptive_simpson(f, -a_, a_, 1e-13 * scale, 50);
    return std::isfinite(m) ? m : k_inf;
  }

 private:
  void build_tables() {
    const std::size_t n = 2048;
    double h = a_ / static_cast<double>(n);
    auto jf = [&](double x) { return j(x); };
    k_.x0 = 0.0;
    k_.dx = h;
    k_.v.assign(n + 1, 0.0);
    k_.m.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      double u = h * static_cast<double>(i);
      k_.v[i] = k_.v[i + 1] + simpson_panel(jf, u, u + h);
    }
    for (std::size_t i = 0; i <= n; ++i) k_.m[i] = -j(h * static_cast<double>(i));
    auto k_exact = [&](double z) {
      auto i = std::min(static_cast<std::size_t>(z / h), n - 1);
      double u = h * static_cast<double>(i);
      return k_.v[i + 1] + simpson_panel(jf, z, u + h);
    };
    ik_.x0 = 0.0;
    ik_.dx = h;
    ik_.v.assign(n + 1, 0.0);
    ik_.m.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double u = h * static_cast<double>(i);
      ik_.v[i + 1] = ik_.v[i] + simpson_panel(k_exact, u, u + h);
    }
    for (std::size_t i = 0; i <= n; ++i) ik_.m[i] = k_.v[i];
  }

  double a_;
  double c_ = 0.0;
  hermite_table k_;
  hermite_table ik_;
};

class power_base final : public symmetric_base {
 public:
  power_base(double alpha, double lambda) : alpha_(alpha), lambda_(lambda) {
    rho_ = std::pow(2.0 * lambda_ / (alpha_ - 1.0), 1.0 / (alpha_ - 1.0));
  }
  double j(double x) const override { return lambda_ * std::pow(rho_ + std::abs(x), -alpha_); }
  double sup_j() const override { return lambda_ * std::pow(rho_, -alpha_); }
  double core_width() const override { return rho_; }
  double radius_for(double mass_tol) const override {
    double r = std::pow(2.0 * lambda_ / (mass_tol * (alpha_ - 1.0)), 1.0 / (alpha_ - 1.0));
    if (!(r < k_radius_cap)) return k_radius_cap;
    return std::max(r - rho_, rho_);
  }
  double ik_limit() const override {
    if (alpha_ <= 2.0) return k_inf;
    return lambda_ * std::pow(rho_, 2.0 - alpha_) / ((alpha_ - 1.0) * (alpha_ - 2.0));
  }
  tail_class tails() const override {
    tail_class t;
    t.thin_plus = t.thin_minus = false;
    t.j1_plus = t.j1_minus = alpha_ > 2.0;
    t.heavy = heavy_tail_info{alpha_, lambda_};
    return t;
  }

 protected:
  double tail_pos(double z) const override {
    return lambda_ * std::pow(rho_ + z, 1.0 - alpha_) / (alpha_ - 1.0);
  }
  double ik_pos(double w) const override {
    if (std::abs(alpha_ - 2.0) < 1e-9) return lambda_ * std::log1p(w / rho_);
    return lambda_ * (std::pow(rho_ + w, 2.0 - alpha_) - std::pow(rho_, 2.0 - alpha_)) /
           ((alpha_ - 1.0) * (2.0 - alpha_));
  }
  double mgf_abs(double nu) const override { return nu == 0.0 ? 1.0 : k_inf; }

 private:
  double alpha_;
  double lambda_;
  double rho_;
};

class logtail_base final : public symmetric_base {
 public:
  logtail_base(double beta, double lambda) : beta_(beta), lambda_(lambda) {
    a0_ = std::exp(std::pow(2.0 * lambda_ / (beta_ - 1.0), 1.0 / (beta_ - 1.0)));
  }
  double j(double x) const override {
    double u = a0_ + std::abs(x);
    return lambda_ / (u * std::pow(std::log(u), beta_));
  }
  double sup_j() const override { return j(0.0); }
  double core_width() const override { return a0_; }
  double radius_for(double mass_tol) const override {
    double ln_r = std::pow(2.0 * lambda_ / (mass_tol * (beta_ - 1.0)), 1.0 / (beta_ - 1.0));
    if (ln_r > 690.0) return k_radius_cap;
    double r = std::exp(ln_r);
    return std::max(r - a0_, a0_);
  }
  double ik_limit() const override { return k_inf; }
  tail_class tails() const override {
    tail_class t;
    t.thin_plus = t.thin_minus = false;
    t.j1_plus = t.j1_minus = false;
    t.log_heavy = log_heavy_tail_info{beta_, lambda_};
    return t;
  }

 protected:
  double tail_pos(double z) const override {
    return lambda_ * std::pow(std::log(a0_ + z), 1.0 - beta_) / (beta_ - 1.0);
  }
  double ik_pos(double w) const override {
    if (w == 0.0) return 0.0;
    auto f = [&](double z) { return tail_pos(z); };
    return adaptive_simpson(f, 0.0, w, 1e-10 * (1.0 + w), 50);
  }
  double mgf_abs(double nu) const override { return nu == 0.0 ? 1.0 : k_inf; }

 private:
  double beta_;
  double lambda_;
  double a0_;
};

class table_base final : public kernel_base {
 public:
  table_base(std::vector<double> xs, std::vector<double> js)
      : xs_(std::move(xs)), js_(std::move(js)) {
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
      mass += 0.5 * (js_[i] + js_[i + 1]) * (xs_[i + 1] - xs_[i]);
    if (!(mass > 0.0))
      fail(errc::normalization_failure, "tabulated kernel carries zero mass");
    for (double& v : js_) v /= mass;
    build_cumulative();
  }

  double j(double x) const override {
    if (x <= xs_.front() || x >= xs_.back()) {
      if (x == xs_.front()) return js_.front();
      if (x == xs_.back()) return js_.back();
      return 0.0;
    }
    std::size_t i = segment(x);
    double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return js_[i] + t * (js_[i + 1] - js_[i]);
  }

  double tail(double z) const override {
    if (z <= xs_.front()) return 1.0;
    if (z >= xs_.back()) return 0.0;
    std::size_t i = segment(z);
    return tail_in_segment(i, z - xs_[i]);
  }

  double integrated_tail(double w) const override { return s_of(w) - s0_; }

  double mgf(double nu) const override {
    auto f = [&](double x) { return j(x) * std::exp(nu * x); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
      total += simpson_panel(f, xs_[i], xs_[i + 1]);
    return std::isfinite(total) ? total : k_inf;
  }

  double sup_j() const override { return *std::max_element(js_.begin(), js_.end()); }

  double core_width() const override {
    double half = 0.5 * sup_j();
    double lo = xs_.back(), hi = xs_.front();
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (js_[i] >= half) {
        lo = std::min(lo, xs_[i]);
        hi = std::max(hi, xs_[i]);
      }
    }
    double fwhm = hi - lo;
    double min_gap = xs_.back() - xs_.front();
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
      min_gap = std::min(min_gap, xs_[i + 1] - xs_[i]);
    return std::max(0.5 * fwhm, min_gap);
  }

  double radius_for(double) const override {
    return std::max(std::abs(xs_.front()), std::abs(xs_.back()));
  }

  double ik_limit() const override { return s_.back() - s0_; }

  tail_class tails() const override { return {}; }

  std::shared_ptr<const kernel_base> flipped() const override {
    std::vector<double> xs(xs_.rbegin(), xs_.rend());
    for (double& x : xs) x = -x;
    std::vector<double> js(js_.rbegin(), js_.rend());
    return std::make_shared<table_base>(std::move(xs), std::move(js));
  }

 private:
  std::size_t segment(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i == 0) return 0;
    if (i >= xs_.size()) return xs_.size() - 2;
    return i - 1;
  }

  // Within segment i at offset tau from the left node: K is the exact
  // quadratic determined by the piecewise-linear J.
  double tail_in_segment(std::size_t i, double tau) const {
    double h = xs_[i + 1] - xs_[i];
    double a = js_[i];
    double b = (js_[i + 1] - js_[i]) / h;
    return k_[i + 1] + a * (h - tau) + 0.5 * b * (h * h - tau * tau);
  }

  // S(x) = int_{x_front}^{x} K, extended linearly (K = 1) to the left and
  // as a constant to the right.
  double s_of(double x) const {
    if (x <= xs_.front()) return x - xs_.front();
    if (x >= xs_.back()) return s_.back();
    std::size_t i = segment(x);
    double tau = x - xs_[i];
    double h = xs_[i + 1] - xs_[i];
    double a = js_[i];
    double b = (js_[i + 1] - js_[i]) / h;
    return s_[i] + k_[i + 1] * tau + a * (h * tau - 0.5 * tau * tau) +
           0.5 * b * (h * h * tau - tau * tau * tau / 3.0);
  }

  void build_cumulative() {
    std::size_t n = xs_.size();
    k_.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
      k_[i] = k_[i + 1] + 0.5 * (js_[i] + js_[i + 1]) * (xs_[i + 1] - xs_[i]);
    s_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double h = xs_[i + 1] - xs_[i];
      double a = js_[i];
      double b = (js_[i + 1] - js_[i]) / h;
      s_[i + 1] = s_[i] + k_[i + 1] * h + a * 0.5 * h * h + b * h * h * h / 3.0;
    }
    s0_ = s_of(0.0);
  }

  std::vector<double> xs_;
  std::vector<double> js_;
  std::vector<double> k_;  // K at nodes
  std::vector<double> s_;  // cumulative integral of K from the left end
  double s0_ = 0.0;
};

}  // namespace

}  // namespace detail

const char* kernel_family_name(kernel_family f) {
  switch (f) {
    case kernel_family::uniform: return "uniform";
    case kernel_family::triangular: return "triangular";
    case kernel_family::gaussian: return "gaussian";
    case kernel_family::laplace: return "laplace";
    case kernel_family::compact_bump: return "compact_bump";
    case kernel_family::power_tail: return "power_tail";
    case kernel_family::log_tail: return "log_tail";
    case kernel_family::tabulated: return "tabulated";
  }
  return "unknown";
}

double kernel::operator()(double x) const { return base_->j(x - shift_); }

double kernel::tail(double z) const { return base_->tail(z - shift_); }

double kernel::integrated_tail(double w) const {
  if (shift_ == 0.0) return base_->integrated_tail(w);
  return base_->integrated_tail(w - shift_) - base_->integrated_tail(-shift_);
}

double kernel::mgf(double nu) const {
  double m = base_->mgf(nu);
  if (!std::isfinite(m)) return k_inf;
  if (shift_ == 0.0 || nu == 0.0) return m;
  double scaled = m * std::exp(nu * shift_);
  return std::isfinite(scaled) ? scaled : k_inf;
}

double kernel::first_moment_right() const {
  double lim = base_->ik_limit();
  if (!std::isfinite(lim)) return k_inf;
  return lim - base_->integrated_tail(-shift_);
}

double kernel::sup_j() const { return base_->sup_j(); }

double kernel::core_width() const { return base_->core_width(); }

double kernel::trunc_radius() const { return radius_; }

kernel kernel::reflected() const {
  kernel r;
  r.spec_ = spec_;
  r.spec_.shift = -shift_;
  r.shift_ = -shift_;
  if (auto f = base_->flipped()) {
    r.base_ = f;
    r.spec_.table_x.assign(spec_.table_x.rbegin(), spec_.table_x.rend());
    for (double& x : r.spec_.table_x) x = -x;
    r.spec_.table_j.assign(spec_.table_j.rbegin(), spec_.table_j.rend());
  } else {
    r.base_ = base_;
  }
  r.tails_ = tails_;
  std::swap(r.tails_.thin_plus, r.tails_.thin_minus);
  std::swap(r.tails_.j1_plus, r.tails_.j1_minus);
  r.radius_ = radius_;
  return r;
}

kernel make_kernel(const kernel_spec& spec) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(errc::invalid_parameter, what);
  };
  require(std::isfinite(spec.shift), "kernel shift must be finite");
  std::shared_ptr<const detail::kernel_base> base;
  switch (spec.family) {
    case kernel_family::uniform:
      require(spec.a > 0.0 && std::isfinite(spec.a), "uniform kernel needs half-width a > 0");
      base = std::make_shared<detail::uniform_base>(spec.a);
      break;
    case kernel_family::triangular:
      require(spec.a > 0.0 && std::isfinite(spec.a), "triangular kernel needs half-width a > 0");
      base = std::make_shared<detail::triangular_base>(spec.a);
      break;
    case kernel_family::gaussian:
      require(spec.s > 0.0 && std::isfinite(spec.s), "gaussian kernel needs std dev s > 0");
      base = std::make_shared<detail::gaussian_base>(spec.s);
      break;
    case kernel_family::laplace:
      require(spec.b > 0.0 && std::isfinite(spec.b), "laplace kernel needs scale b > 0");
      base = std::make_shared<detail::laplace_base>(spec.b);
      break;
    case kernel_family::compact_bump:
      require(spec.a > 0.0 && std::isfinite(spec.a), "compact_bump kernel needs half-width a > 0");
      base = std::make_shared<detail::bump_base>(spec.a);
      break;
    case kernel_family::power_tail:
      require(spec.alpha > 1.0 && std::isfinite(spec.alpha),
              "power_tail exponent alpha must exceed 1 for unit mass");
      require(spec.lambda > 0.0 && std::isfinite(spec.lambda),
              "power_tail constant lambda must be positive");
      base = std::make_shared<detail::power_base>(spec.alpha, spec.lambda);
      break;
    case kernel_family::log_tail:
      require(spec.beta > 1.0 && std::isfinite(spec.beta),
              "log_tail exponent beta must exceed 1 for unit mass");
      require(spec.lambda > 0.0 && std::isfinite(spec.lambda),
              "log_tail constant lambda must be positive");
      base = std::make_shared<detail::logtail_base>(spec.beta, spec.lambda);
      break;
    case kernel_family::tabulated: {
      require(spec.table_x.size() == spec.table_j.size(), "tabulated kernel columns differ in length");
      require(spec.table_x.size() >= 2, "tabulated kernel needs at least two samples");
      for (std::size_t i = 0; i < spec.table_x.size(); ++i) {
        require(std::isfinite(spec.table_x[i]) && std::isfinite(spec.table_j[i]),
                "tabulated kernel contains non-finite entries");
        require(spec.table_j[i] >= 0.0, "tabulated kernel values must be nonnegative");
        if (i > 0)
          require(spec.table_x[i] > spec.table_x[i - 1],
                  "tabulated kernel abscissae must be strictly increasing");
      }
      base = std::make_shared<detail::table_base>(spec.table_x, spec.table_j);
      break;
    }
  }
  kernel k;
  k.spec_ = spec;
  k.base_ = base;
  k.shift_ = spec.shift;
  k.tails_ = base->tails();
  if (!(k(0.0) > 0.0))
    fail(errc::invalid_parameter,
         "kernel must satisfy J(0) > 0; the shift places the origin outside the support");
  double r = base->radius_for(k_mass_tol) + std::abs(spec.shift);
  k.radius_ = std::min(r, k_radius_cap);
  return k;
}

c_star_result c_star(const kernel& k, double d, double f0, direction dir) {
  if (!(d > 0.0) || !std::isfinite(d)) fail(errc::invalid_parameter, "c_star needs d > 0");
  if (!(f0 > 0.0) || !std::isfinite(f0)) fail(errc::invalid_parameter, "c_star needs f0 > 0");
  if (dir == direction::left) {
    c_star_result r = c_star(k.reflected(), d, f0, direction::right);
    c_star_result out;
    out.finite = r.finite;
    out.value = -r.value;
    out.nu = r.finite ? -r.nu : k_nan;
    return out;
  }
  if (!k.tails().thin_plus) return {k_inf, k_nan, false};

  auto g = [&](double nu) {
    double m = k.mgf(nu);
    if (!std::isfinite(m)) return k_inf;
    return (d * m - d + f0) / nu;
  };

  double lo = 1e-6;
  for (int shrink = 0; shrink < 40 && !std::isfinite(g(lo)); ++shrink) lo *= 1e-3;
  if (!std::isfinite(g(lo)))
    fail(errc::no_convergence, "could not locate a finite exponential moment");

  for (int attempt = 0; attempt < 6; ++attempt) {
    std::vector<double> nus{lo};
    std::vector<double> vals{g(lo)};
    std::size_t best = 0;
    while (nus.back() < 1e15) {
      double nu = nus.back() * 2.0;
      double v = g(nu);
      nus.push_back(nu);
      vals.push_back(v);
      if (v < vals[best]) best = nus.size() - 1;
      if (!std::isfinite(v)) break;
      if (nus.size() > best + 4) break;  // clearly past the minimum
    }
    if (best == 0) {
      lo *= 1e-3;  // minimum sits below the scan start
      continue;
    }
    double bl = nus[best - 1];
    double bh = best + 1 < nus.size() ? nus[best + 1] : nus[best] * 2.0;
    min_result m = golden_section_min(g, bl, bh, 1e-12 * bh);
    return {m.fx, m.x, true};
  }
  fail(errc::no_convergence, "speed functional minimization failed to bracket");
}

double flux_moment(const kernel& k, double k_outer, double delta, flux_mode mode) {
  if (!(k_outer > 1.0) || !std::isfinite(k_outer))
    fail(errc::invalid_parameter, "flux moment needs outer scale k > 1");
  if (!(delta >= 0.0 && delta < 1.0))
    fail(errc::invalid_parameter, "flux moment needs inner fraction in [0, 1)");
  double inner = mode == flux_mode::linear_inner ? delta * k_outer : std::pow(k_outer, delta);
  double a = k.integrated_tail(k_outer) - k.integrated_tail(inner);
  if (!std::isfinite(a))
    fail(errc::quadrature_overflow, "flux moment exceeded the representable tail range");
  return a;
}

}  // namespace nlfront
