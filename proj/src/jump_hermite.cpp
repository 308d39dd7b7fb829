#include "eep/jump_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eep {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kGaussCut = 60.0;

}  // namespace

JumpDensityExpansion::JumpDensityExpansion(const JumpModel& model, double anchor_x, int order,
                                           JumpExpansionConfig config)
    : model_(model),
      transform_(make_transform(model.log_diffusion, anchor_x)),
      diffusion_(transform_, order, config.diffusion),
      order_(order),
      config_(config),
      rho_(model.jumps.intensity) {
  if (order_ < 1 || order_ > 2) throw ParameterError("jump expansion: order must be 1 or 2");
  if (rho_ < 0.0) throw ParameterError("jump expansion: negative intensity");
  if (config_.jump_nodes < 2 || config_.conv_points < 8 || !(config_.fd_step > 0.0)) {
    throw ParameterError("jump expansion: invalid quadrature settings");
  }
  if (rho_ > 0.0) {
    const Interval sup = model_.jumps.support;
    conv_lo_ = 2.0 * sup.lo;
    conv_h_ = 2.0 * (sup.hi - sup.lo) / (config_.conv_points - 1);
    conv_.resize(config_.conv_points);
    for (int i = 0; i < config_.conv_points; ++i) conv_[i] = jump_conv_direct(conv_lo_ + i * conv_h_);
  }
  anchor_x_ = anchor_x;
  const DiffusionSpec& s = model_.log_diffusion;
  invariant_ = s.closed_form.has_value();
  for (double d : {-5.0, -1.0, 1.0, 5.0}) {
    if (s.mu(anchor_x + d) != s.mu(anchor_x) || s.sigma(anchor_x + d) != s.sigma(anchor_x)) invariant_ = false;
  }
  if (invariant_ && rho_ > 0.0 && order_ >= 2) {
    d2_tab_.resize(conv_.size());
    for (std::size_t i = 0; i < conv_.size(); ++i) d2_tab_[i] = d2(anchor_x, anchor_x + conv_lo_ + i * conv_h_, true);
  }
}

std::vector<double> JumpDensityExpansion::jump_panels(double shift) const {
  const Interval sup = model_.jumps.support;
  std::vector<double> e{sup.lo, sup.hi, shift - sup.hi, shift - sup.lo};
  for (double b : model_.jumps.breakpoints) {
    e.push_back(b);
    e.push_back(shift - b);
  }
  std::vector<double> out;
  for (double v : e) {
    if (v >= sup.lo && v <= sup.hi) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return b - a < 1e-14; }),
            out.end());
  return out;
}

double JumpDensityExpansion::jump_conv_direct(double z) const {
  if (rho_ == 0.0 || !(model_.jumps.support.hi > model_.jumps.support.lo)) return 0.0;
  const std::vector<double> edges = jump_panels(z);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integrate([&](double c) { return jump_pdf(z - c) * jump_pdf(c); }, edges[i], edges[i + 1],
                       {config_.jump_nodes, 1});
  }
  return total;
}

double JumpDensityExpansion::jump_conv(double z) const {
  if (conv_.empty()) return 0.0;
  const double top = conv_lo_ + (conv_.size() - 1) * conv_h_;
  if (z <= conv_lo_ || z >= top) return 0.0;
  return interp_cubic_uniform(conv_lo_, conv_h_, conv_, z);
}

double JumpDensityExpansion::w_B(double x, double x_to) const {
  return transform_->gamma(x) - transform_->gamma(x_to);
}

double JumpDensityExpansion::c_minus1(double x, double x_to) const {
  const double w = w_B(x, x_to);
  return 0.5 * w * w;
}

double JumpDensityExpansion::drift_integral(double y_from, double y_to) const {
  if (y_from == y_to) return 0.0;
  const double lo = std::min(y_from, y_to), hi = std::max(y_from, y_to);
  const double v = integrate([&](double w) { return transform_->mu_Y(w); }, lo, hi, {16, 1});
  return y_to >= y_from ? v : -v;
}

double JumpDensityExpansion::c0(double x, double x_to) const {
  const LampertiTransform& tr = *transform_;
  return kInvSqrt2Pi / tr.spec().sigma(x_to) * std::exp(drift_integral(tr.gamma(x), tr.gamma(x_to)));
}

double JumpDensityExpansion::generator(const std::function<double(double)>& f, double x) const {
  const DiffusionSpec& s = transform_->spec();
  const double h = config_.fd_step;
  const double fm = f(x - h), f0 = f(x), fp = f(x + h);
  const double sig = s.sigma(x);
  return 0.5 * sig * sig * (fp - 2.0 * f0 + fm) / (h * h) + s.mu(x) * (fp - fm) / (2.0 * h);
}

double JumpDensityExpansion::ck(int k, double x, double x_to) const {
  if (k == -1) return c_minus1(x, x_to);
  if (k == 0) return c0(x, x_to);
  return ck_next(k - 1, x, x_to);
}

double JumpDensityExpansion::ck_next(int k, double x, double x_to) const {
  if (k < 0) throw ParameterError("ck_next: k must be nonnegative");
  const LampertiTransform& tr = *transform_;
  auto source_term = [&](double s) {
    const double c = ck(k, s, x_to);
    return rho_ * c - generator([&](double u) { return ck(k, u, x_to); }, s);
  };
  const double y_to = tr.gamma(x_to);
  const double W = y_to - tr.gamma(x);
  if (std::abs(W) < 1e-10) {
    const double v = -source_term(x_to) / (k + 1);
    if (!std::isfinite(v)) throw EvaluationError("ck_next: non-finite value", x);
    return v;
  }
  const double y_x = tr.gamma(x);
  const GaussLegendre& gl = gauss_legendre(config_.diffusion.coeff_nodes);
  const double half = 0.5 * (x_to - x), mid = 0.5 * (x + x_to);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    const double s = mid + half * gl.x[i];
    const double ys = tr.gamma(s);
    const double Ws = y_to - ys;
    const double g = std::exp(drift_integral(y_x, ys)) / tr.spec().sigma(s) * std::pow(Ws, k) *
                     source_term(s);
    acc += gl.w[i] * g;
  }
  const double v = -std::pow(W, -(k + 1)) * half * acc;
  if (!std::isfinite(v)) throw EvaluationError("ck_next: non-finite value", x);
  return v;
}

double JumpDensityExpansion::d1(double x, double x_to) const { return rho_ * jump_pdf(x_to - x); }

double JumpDensityExpansion::gaussian_moment(int r) {
  if (r < 0) throw ParameterError("gaussian_moment: r must be nonnegative");
  double m = 1.0;
  for (int i = 1; i <= r; ++i) m *= 2.0 * i - 1.0;
  return m;
}

// m_0(x, x_to, w): pre-image s of w under w_B(., x_to), then C0(s, x_to) v(s - x) sigma(s).
double JumpDensityExpansion::m0(double x, double x_to, double w) const {
  const LampertiTransform& tr = *transform_;
  const double y_to = tr.gamma(x_to);
  const double s = tr.gamma_inv(y_to + w);
  const double c = kInvSqrt2Pi / tr.spec().sigma(x_to) * std::exp(drift_integral(y_to + w, y_to));
  return c * jump_pdf(s - x) * tr.spec().sigma(s);
}

double JumpDensityExpansion::d2(double x, double x_to, bool tabulated) const {
  if (rho_ == 0.0) return 0.0;
  const LampertiTransform& tr = *transform_;
  const DiffusionSpec& s = tr.spec();
  const double z = x_to - x;
  // Generator applied to D1 in its first argument, plus the jump part.
  const double lin = generator([&](double u) { return d1(u, x_to); }, x);
  const double conv = tabulated ? jump_conv(z) : jump_conv_direct(z);
  const double jump_part = rho_ * (rho_ * conv - d1(x, x_to));
  // C^(1) on the diagonal.
  double c1_diag;
  if (tabulated) {
    c1_diag = kInvSqrt2Pi / s.sigma(x_to) * (tr.lambda_Y(tr.gamma(x_to)) - rho_);
  } else {
    c1_diag = ck_next(0, x_to, x_to);
  }
  const double m1 = c1_diag * jump_pdf(z) * s.sigma(x_to);
  const double h = config_.fd_step;
  const double m0_2 = (m0(x, x_to, h) - 2.0 * m0(x, x_to, 0.0) + m0(x, x_to, -h)) / (h * h);
  const double sum = gaussian_moment(0) * m1 + gaussian_moment(1) / 2.0 * m0_2;
  return 0.5 * (lin + jump_part + std::sqrt(2.0 * std::numbers::pi) * rho_ * sum);
}

double JumpDensityExpansion::dk_next(int k, double x, double x_to) const {
  if (k == 0) return std::sqrt(2.0 * std::numbers::pi) * rho_ * m0(x, x_to, 0.0);
  if (k == 1) return d2(x, x_to, false);
  throw ParameterError("dk_next: only D^(1) and D^(2) are supported");
}

double JumpDensityExpansion::jump_density(double x_to, double x_from, double dt) const {
  if (!(dt > 0.0)) throw ParameterError("jump_density: delta_t must be positive");
  double total = 0.0;
  const double cm1 = c_minus1(x_from, x_to);
  if (cm1 / dt <= kGaussCut) {
    double series = 0.0;
    double p = 1.0;
    for (int k = 0; k <= order_; ++k) {
      series += ck(k, x_from, x_to) * p;
      p *= dt;
    }
    total += std::exp(-cm1 / dt) / std::sqrt(dt) * series;
  }
  total += d1(x_from, x_to) * dt;
  if (order_ >= 2) total += d2(x_from, x_to, false) * dt * dt;
  return std::max(total, 0.0);
}

JumpSourceKernel JumpDensityExpansion::kernel(double x_from, double max_gap) const {
  if (!(max_gap > 0.0)) throw ParameterError("jump kernel: max_gap must be positive");
  JumpSourceKernel k;
  k.owner_ = this;
  k.x0_ = x_from;
  k.y0_ = transform_->gamma(x_from);
  const double reach = std::sqrt(2.0 * kGaussCut * max_gap) * 1.001;
  k.diff_ = diffusion_.kernel(x_from, k.y0_ - reach, k.y0_ + reach);
  return k;
}

double JumpSourceKernel::density(double x, double dt, long* clamps) const {
  if (!(dt > 0.0)) throw ParameterError("jump density: delta_t must be positive");
  const JumpDensityExpansion& e = *owner_;
  const LampertiTransform& tr = *e.transform_;
  const double rho = e.rho_;
  const int m = e.order_;
  double total = 0.0;
  const double y = tr.gamma(x);
  const double w = y - y0_;
  if (w * w / (2.0 * dt) <= kGaussCut && y >= diff_.lo() && y <= diff_.hi()) {
    const KernelPoint kp = diff_.point(y);
    // Cauchy product of exp(-rho dt) with the diffusion series, truncated at order m.
    double series = 0.0;
    double dk = 1.0;
    for (int k = 0; k <= m; ++k) {
      double ck = 0.0;
      double fi = 1.0;
      for (int i = 0; i <= k; ++i) {
        if (i > 0) fi *= -rho / i;
        const int j = k - i;
        double fj = 1.0;
        for (int t = 2; t <= j; ++t) fj *= t;
        ck += fi * kp.c[j] / fj;
      }
      series += ck * dk;
      dk *= dt;
    }
    total += std::exp(-w * w / (2.0 * dt) + kp.A) / std::sqrt(2.0 * std::numbers::pi * dt) * series /
             tr.spec().sigma(x);
  }
  if (rho > 0.0) {
    total += e.d1(x0_, x) * dt;
    if (m >= 2) {
      double d2v = 0.0;
      if (!e.d2_tab_.empty()) {
        const double z = x - x0_;
        const double top = e.conv_lo_ + (e.d2_tab_.size() - 1) * e.conv_h_;
        if (z > e.conv_lo_ && z < top) d2v = interp_cubic_uniform(e.conv_lo_, e.conv_h_, e.d2_tab_, z);
      } else {
        d2v = e.d2(x0_, x, true);
      }
      total += d2v * dt * dt;
    }
  }
  if (total < 0.0) {
    if (clamps) ++*clamps;
    return 0.0;
  }
  return total;
}

}  // namespace eep
