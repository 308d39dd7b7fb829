#include "eep/lamperti.hpp"

#include <algorithm>
#include <cmath>

namespace eep {

namespace {
constexpr int kKnots = 512;
constexpr double kKnotLo = 1e-8;
constexpr double kKnotHi = 1e4;
constexpr double kEffLo = 1e-12;
constexpr double kEffHi = 1e12;
constexpr double kLinearHalfWidth = 50.0;
}  // namespace

LampertiTransform::LampertiTransform(DiffusionSpec spec, double anchor)
    : spec_(std::move(spec)), anchor_(anchor) {
  if (!spec_.domain.contains(anchor_)) throw DomainError("Lamperti anchor outside domain");
  const Interval& d = spec_.domain;
  log_knots_ = d.lo >= 0.0;

  if (spec_.closed_form) {
    const auto& cf = *spec_.closed_form;
    offset_ = cf.antiderivative(anchor_);
    y_range_ = {cf.antiderivative(d.lo) - offset_, cf.antiderivative(d.hi) - offset_};
    if (std::isnan(y_range_.lo)) y_range_.lo = -std::numeric_limits<double>::infinity();
    if (std::isnan(y_range_.hi)) y_range_.hi = std::numeric_limits<double>::infinity();
    s_range_ = d;
    return;
  }

  double lo, hi;
  if (log_knots_) {
    lo = std::max(anchor_ * kKnotLo, d.lo > 0.0 ? d.lo * (1.0 + 1e-12) : 0.0);
    hi = std::min(anchor_ * kKnotHi, d.hi * (1.0 - 1e-12));
    s_range_ = {std::max(anchor_ * kEffLo, lo), std::min(anchor_ * kEffHi, d.hi * (1.0 - 1e-12))};
  } else {
    lo = std::max(anchor_ - kLinearHalfWidth, d.lo + 1e-9);
    hi = std::min(anchor_ + kLinearHalfWidth, d.hi - 1e-9);
    s_range_ = {std::max(anchor_ - 20.0 * kLinearHalfWidth, d.lo + 1e-9),
                std::min(anchor_ + 20.0 * kLinearHalfWidth, d.hi - 1e-9)};
  }
  knot_s_.resize(kKnots);
  knot_g_.resize(kKnots);
  for (int i = 0; i < kKnots; ++i) {
    const double t = static_cast<double>(i) / (kKnots - 1);
    knot_s_[i] = log_knots_ ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  knot_s_.back() = hi;
  knot_g_[0] = 0.0;
  for (int i = 1; i < kKnots; ++i) {
    knot_g_[i] = knot_g_[i - 1] + integrate_inv_sigma(knot_s_[i - 1], knot_s_[i]);
  }
  offset_ = raw_gamma(anchor_);
  y_range_ = {gamma(s_range_.lo), gamma(s_range_.hi)};
}

double LampertiTransform::integrate_inv_sigma(double a, double b) const {
  if (a == b) return 0.0;
  const bool flip = a > b;
  if (flip) std::swap(a, b);
  int panels = 1;
  if (log_knots_ && a > 0.0) {
    panels = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(1.5))));
  } else {
    panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
  }
  const GaussLegendre& gl = gauss_legendre(16);
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = (log_knots_ && a > 0.0) ? a * std::pow(b / a, static_cast<double>(p) / panels)
                                              : a + (b - a) * p / panels;
    const double pb = (log_knots_ && a > 0.0)
                          ? (p + 1 == panels ? b : a * std::pow(b / a, static_cast<double>(p + 1) / panels))
                          : (p + 1 == panels ? b : a + (b - a) * (p + 1) / panels);
    const double half = 0.5 * (pb - pa);
    const double mid = pa + half;
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += gl.w[i] / spec_.sigma(mid + half * gl.x[i]);
    total += half * acc;
  }
  return flip ? -total : total;
}

double LampertiTransform::raw_gamma(double S) const {
  const double lo = knot_s_.front();
  const double hi = knot_s_.back();
  if (S <= lo) return -integrate_inv_sigma(S, lo);
  if (S >= hi) return knot_g_.back() + integrate_inv_sigma(hi, S);
  int j;
  if (log_knots_) {
    j = static_cast<int>(std::log(S / lo) / std::log(hi / lo) * (kKnots - 1));
  } else {
    j = static_cast<int>((S - lo) / (hi - lo) * (kKnots - 1));
  }
  j = std::clamp(j, 0, kKnots - 2);
  while (j > 0 && knot_s_[j] > S) --j;
  while (j < kKnots - 2 && knot_s_[j + 1] < S) ++j;
  const GaussLegendre& gl = gauss_legendre(8);
  const double half = 0.5 * (S - knot_s_[j]);
  const double mid = knot_s_[j] + half;
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += gl.w[i] / spec_.sigma(mid + half * gl.x[i]);
  return knot_g_[j] + half * acc;
}

double LampertiTransform::gamma(double S) const {
  if (!spec_.domain.contains(S)) throw DomainError("gamma: state outside domain");
  if (spec_.closed_form) return spec_.closed_form->antiderivative(S) - offset_;
  return raw_gamma(S) - offset_;
}

double LampertiTransform::gamma_inv(double y) const {
  if (!(y >= y_range_.lo && y <= y_range_.hi)) throw RangeError("gamma_inv: y outside range");
  if (spec_.closed_form) return spec_.closed_form->inverse(y + offset_);

  const double g = y + offset_;
  double a, b;
  if (g < knot_g_.front()) {
    b = knot_s_.front();
    double step = 1.0;
    a = log_knots_ ? 0.5 * b : b - step;
    while (a > s_range_.lo && raw_gamma(a) > g) {
      b = a;
      step *= 2.0;
      a = log_knots_ ? 0.5 * a : a - step;
    }
    a = std::max(a, s_range_.lo);
  } else if (g > knot_g_.back()) {
    a = knot_s_.back();
    double step = 1.0;
    b = log_knots_ ? 2.0 * a : a + step;
    while (b < s_range_.hi && raw_gamma(b) < g) {
      a = b;
      step *= 2.0;
      b = log_knots_ ? 2.0 * b : b + step;
    }
    b = std::min(b, s_range_.hi);
  } else {
    auto it = std::upper_bound(knot_g_.begin(), knot_g_.end(), g);
    int j = static_cast<int>(it - knot_g_.begin()) - 1;
    j = std::clamp(j, 0, kKnots - 2);
    a = knot_s_[j];
    b = knot_s_[j + 1];
  }
  const double tol = 1e-14 * std::max(std::abs(a), std::abs(b)) + 1e-300;
  return solve_root([&](double s) { return raw_gamma(s) - g; }, {a, b, tol, 200});
}

double LampertiTransform::mu_Y_state(double S) const {
  if (spec_.closed_form) return spec_.closed_form->drift_y(S);
  return spec_.mu(S) / spec_.sigma(S) - 0.5 * spec_.sigma_prime(S);
}

double LampertiTransform::mu_Y(double y) const { return mu_Y_state(gamma_inv(y)); }

double LampertiTransform::dmu_Y(double y) const {
  const double S = gamma_inv(y);
  if (spec_.closed_form) return spec_.closed_form->drift_y_slope(S);
  // Chain rule: a y-step h corresponds to an S-step sigma(S) h.
  const double sig = spec_.sigma(S);
  const double hs = 1e-5 * std::max(1.0, std::abs(y)) * sig;
  return sig * (mu_Y_state(S + hs) - mu_Y_state(S - hs)) / (2.0 * hs);
}

double LampertiTransform::lambda_Y(double y) const {
  return lambda_Y_state(gamma_inv(y), y);
}

double LampertiTransform::lambda_Y_state(double S, double y) const {
  const double m = mu_Y_state(S);
  double slope;
  if (spec_.closed_form) {
    slope = spec_.closed_form->drift_y_slope(S);
  } else {
    const double sig = spec_.sigma(S);
    const double hs = 1e-5 * std::max(1.0, std::abs(y)) * sig;
    slope = sig * (mu_Y_state(S + hs) - mu_Y_state(S - hs)) / (2.0 * hs);
  }
  return -0.5 * (m * m + slope);
}

}  // namespace eep
