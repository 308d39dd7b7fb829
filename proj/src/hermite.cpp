#include "eep/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eep {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Chebyshev coefficients from values at x_i = cos(pi i / (n-1)).
void cheb_fit(const double* f, int n, double* a) {
  const int N = n - 1;
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == N) ? 0.5 : 1.0;
      s += w * f[i] * std::cos(std::numbers::pi * k * i / N);
    }
    a[k] = 2.0 * s / N;
  }
  a[0] *= 0.5;
  a[N] *= 0.5;
}

double clenshaw(const double* a, int n, double x) {
  double b1 = 0.0, b2 = 0.0;
  const double x2 = 2.0 * x;
  for (int k = n - 1; k >= 1; --k) {
    const double b0 = a[k] + x2 * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return a[0] + x * b1 - b2;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::shared_ptr<const LampertiTransform> make_transform(const DiffusionSpec& spec, double anchor) {
  return std::make_shared<const LampertiTransform>(spec, anchor);
}

DensityExpansion::DensityExpansion(std::shared_ptr<const LampertiTransform> transform, int order,
                                   ExpansionConfig config)
    : transform_(std::move(transform)), order_(order), config_(config) {
  if (!transform_) throw ParameterError("DensityExpansion: missing transform");
  if (order_ < 0 || order_ > kMaxOrder) throw ParameterError("DensityExpansion: order must be in [0, 3]");
  if (config_.coeff_nodes < 2 || config_.table_nodes < 4) {
    throw ParameterError("DensityExpansion: quadrature sizes too small");
  }
}

double DensityExpansion::coeff_c(int j, double y0, double y) const {
  if (j < 0) throw ParameterError("coeff_c: j < 0");
  if (j == 0) return 1.0;
  const GaussLegendre& gl = gauss_legendre(config_.coeff_nodes);
  const double d = y - y0;
  double acc = 0.0;
  for (std::size_t k = 0; k < gl.x.size(); ++k) {
    const double u = 0.5 * (gl.x[k] + 1.0);
    const double w = y0 + u * d;
    const double lam = transform_->lambda_Y(w);
    double g;
    if (j == 1) {
      g = lam;
    } else {
      // c_{j-1} already carries difference noise beyond j = 2, so step wider.
      const double h = (j > 2 ? 1e-2 : 1e-4) * std::max(1.0, std::abs(w));
      const double cm = coeff_c(j - 1, y0, w);
      const double cp = coeff_c(j - 1, y0, w + h);
      const double cn = coeff_c(j - 1, y0, w - h);
      g = lam * cm + 0.5 * (cp - 2.0 * cm + cn) / (h * h);
    }
    acc += 0.5 * gl.w[k] * std::pow(u, j - 1) * g;
  }
  return j * acc;
}

double DensityExpansion::drift_integral(double y0, double y) const {
  if (y == y0) return 0.0;
  return integrate([&](double w) { return transform_->mu_Y(w); }, std::min(y0, y), std::max(y0, y),
                   {64, 1}) *
         (y >= y0 ? 1.0 : -1.0);
}

double DensityExpansion::log_series_and_gauss(double S_to, double S_from, double dt,
                                              double* series) const {
  if (!(dt > 0.0)) throw ParameterError("density: delta_t must be positive");
  const double y0 = transform_->gamma(S_from);
  const double y = transform_->gamma(S_to);
  double s = 1.0;
  for (int k = 1; k <= order_; ++k) s += coeff_c(k, y0, y) * std::pow(dt, k) / factorial(k);
  *series = s;
  const double z = y - y0;
  return -0.5 * (kLog2Pi + std::log(dt)) - z * z / (2.0 * dt) + drift_integral(y0, y) -
         std::log(transform_->spec().sigma(S_to));
}

double DensityExpansion::density(double S_to, double S_from, double dt) const {
  double series;
  const double lg = log_series_and_gauss(S_to, S_from, dt, &series);
  if (series <= 0.0) return 0.0;
  return std::exp(lg) * series;
}

double DensityExpansion::log_density(double S_to, double S_from, double dt) const {
  double series;
  const double lg = log_series_and_gauss(S_to, S_from, dt, &series);
  if (series <= 0.0) return -std::numeric_limits<double>::infinity();
  return lg + std::log(series);
}

SourceKernel DensityExpansion::kernel(double S_from, double y_lo, double y_hi) const {
  const LampertiTransform& tr = *transform_;
  const DiffusionSpec& spec = tr.spec();
  SourceKernel k;
  k.order_ = order_;
  k.s0_ = S_from;
  k.y0_ = tr.gamma(S_from);
  k.log_state_ = spec.domain.lo >= 0.0;

  const Interval yr = tr.y_range();
  double lo = std::min(y_lo, k.y0_);
  double hi = std::max(y_hi, k.y0_);
  lo = std::max(lo, yr.lo);
  hi = std::min(hi, yr.hi);
  const double pad = 1e-6 * std::max(1.0, std::abs(k.y0_));
  if (hi - lo < pad) {
    lo = std::max(lo - pad, yr.lo);
    hi = std::min(hi + pad, yr.hi);
  }
  k.lo_ = lo;
  k.hi_ = hi;
  const int n = config_.table_nodes;
  k.n_ = n;
  k.series_ = 2 + order_;
  k.coef_.assign(static_cast<std::size_t>(k.series_) * n, 0.0);

  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = mid + half * std::cos(std::numbers::pi * i / (n - 1));

  auto to_state_series = [&](double S) { return k.log_state_ ? std::log(S) : S; };
  auto from_state_series = [&](double v) { return k.log_state_ ? std::exp(v) : v; };

  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    const double yi = std::clamp(t[i], yr.lo, yr.hi);
    vals[i] = to_state_series(tr.gamma_inv(yi));
  }
  double* state_coef = k.coef_.data() + 1 * n;
  cheb_fit(vals.data(), n, state_coef);

  auto state_at = [&](double w) {
    if (tr.has_closed_form()) return tr.gamma_inv(w);
    return from_state_series(clenshaw(state_coef, n, (w - mid) / half));
  };

  const GaussLegendre& gl = gauss_legendre(config_.coeff_nodes);
  const int q = static_cast<int>(gl.x.size());
  std::vector<double> lam(static_cast<std::size_t>(n) * q);
  std::vector<double> A(n), c1(n);
  for (int i = 0; i < n; ++i) {
    const double d = t[i] - k.y0_;
    double a_acc = 0.0, c_acc = 0.0;
    for (int j = 0; j < q; ++j) {
      const double u = 0.5 * (gl.x[j] + 1.0);
      const double w = k.y0_ + u * d;
      const double S = state_at(w);
      const double l = tr.lambda_Y_state(S, w);
      lam[static_cast<std::size_t>(i) * q + j] = l;
      a_acc += gl.w[j] * tr.mu_Y_state(S);
      c_acc += gl.w[j] * l;
    }
    A[i] = 0.5 * d * a_acc;
    c1[i] = 0.5 * c_acc;
  }
  cheb_fit(A.data(), n, k.coef_.data());
  if (order_ >= 1) cheb_fit(c1.data(), n, k.coef_.data() + 2 * n);

  std::vector<double> cj(n);
  for (int ord = 2; ord <= order_; ++ord) {
    const double* prev = k.coef_.data() + static_cast<std::size_t>(ord) * n;
    for (int i = 0; i < n; ++i) {
      const double d = t[i] - k.y0_;
      double acc = 0.0;
      for (int j = 0; j < q; ++j) {
        const double u = 0.5 * (gl.x[j] + 1.0);
        const double w = k.y0_ + u * d;
        const double h = 1e-4 * std::max(1.0, std::abs(w));
        const double cm = clenshaw(prev, n, (w - mid) / half);
        const double cp = clenshaw(prev, n, (w + h - mid) / half);
        const double cn = clenshaw(prev, n, (w - h - mid) / half);
        const double g = lam[static_cast<std::size_t>(i) * q + j] * cm + 0.5 * (cp - 2.0 * cm + cn) / (h * h);
        acc += gl.w[j] * std::pow(u, ord - 1) * g;
      }
      cj[i] = ord * 0.5 * acc;
    }
    cheb_fit(cj.data(), n, k.coef_.data() + static_cast<std::size_t>(ord + 1) * n);
  }
  return k;
}

KernelPoint SourceKernel::point(double y) const {
  const double mid = 0.5 * (lo_ + hi_);
  const double half = 0.5 * (hi_ - lo_);
  const double x = (y - mid) / half;
  const double x2 = 2.0 * x;
  std::array<double, kMaxOrder + 2> b1{}, b2{};
  const int ns = series_;
  for (int kk = n_ - 1; kk >= 1; --kk) {
    for (int s = 0; s < ns; ++s) {
      const double b0 = coef_[static_cast<std::size_t>(s) * n_ + kk] + x2 * b1[s] - b2[s];
      b2[s] = b1[s];
      b1[s] = b0;
    }
  }
  KernelPoint kp;
  kp.A = coef_[0] + x * b1[0] - b2[0];
  kp.log_s = coef_[n_] + x * b1[1] - b2[1];
  for (int s = 2; s < ns; ++s) kp.c[s - 1] = coef_[static_cast<std::size_t>(s) * n_] + x * b1[s] - b2[s];
  return kp;
}

double SourceKernel::state(double y) const {
  const KernelPoint kp = point(y);
  return log_state_ ? std::exp(kp.log_s) : kp.log_s;
}

double SourceKernel::density_y(const KernelPoint& kp, double y, double dt, long* clamps) const {
  double series = 1.0;
  double p = 1.0;
  for (int k = 1; k <= order_; ++k) {
    p *= dt / k;
    series += kp.c[k] * p;
  }
  if (series <= 0.0) {
    if (clamps) ++*clamps;
    return 0.0;
  }
  const double z = y - y0_;
  return std::exp(-z * z / (2.0 * dt) + kp.A) / std::sqrt(2.0 * std::numbers::pi * dt) * series;
}

double SourceKernel::density_y(double y, double dt, long* clamps) const {
  if (!(dt > 0.0)) throw ParameterError("density: delta_t must be positive");
  return density_y(point(y), y, dt, clamps);
}

double SourceKernel::log_density_y(double y, double dt) const {
  if (!(dt > 0.0)) throw ParameterError("density: delta_t must be positive");
  const KernelPoint kp = point(y);
  double series = 1.0;
  double p = 1.0;
  for (int k = 1; k <= order_; ++k) {
    p *= dt / k;
    series += kp.c[k] * p;
  }
  if (series <= 0.0) return -std::numeric_limits<double>::infinity();
  const double z = y - y0_;
  return -0.5 * (kLog2Pi + std::log(dt)) - z * z / (2.0 * dt) + kp.A + std::log(series);
}

}  // namespace eep
