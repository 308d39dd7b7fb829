#include "eep/numerics.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace eep {

namespace {

GaussLegendre build_gauss_legendre(int n) {
  GaussLegendre r;
  r.x.resize(n);
  r.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / dp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: n < 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<GaussLegendre>(build_gauss_legendre(n))).first;
  }
  return *it->second;
}

RootResult solve_root_bracketed(const std::function<double(double)>& f, const RootBracket& br) {
  double a = br.lo;
  double b = br.hi;
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa)) throw EvaluationError("solve_root: non-finite f", a);
  if (!std::isfinite(fb)) throw EvaluationError("solve_root: non-finite f", b);
  if (fa == 0.0) return {a, a, a, 0};
  if (fb == 0.0) return {b, b, b, 0};
  if ((fa > 0.0) == (fb > 0.0)) throw BracketError("solve_root: no sign change", fa, fb);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 1; iter <= br.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = std::max(0.5 * br.tol_abs, 2.0 * eps * std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      return {b, std::min(b, c), std::max(b, c), iter};
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb)) throw EvaluationError("solve_root: non-finite f", b);
  }
  throw ConvergenceError("solve_root: iteration cap reached", b);
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.size() != ys.size() || xs.empty()) throw ParameterError("interp_linear: size mismatch");
  if (!(x >= xs.front() && x <= xs.back())) throw RangeError("interp_linear: x outside knots");
  if (xs.size() == 1) return ys[0];
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == xs.size()) return ys.back();
  if (i == 0) i = 1;
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double interp_cubic_uniform(double x0, double h, std::span<const double> ys, double x) {
  const int n = static_cast<int>(ys.size());
  if (n < 4) throw ParameterError("interp_cubic_uniform: need 4 knots");
  const double u = (x - x0) / h;
  if (!(u >= 0.0 && u <= n - 1.0)) throw RangeError("interp_cubic_uniform: x outside knots");
  int i = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  const double t = u - i;
  const double y0 = ys[i], y1 = ys[i + 1], y2 = ys[i + 2], y3 = ys[i + 3];
  // Lagrange basis on knots 0..3.
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3;
}

ChebyshevGrid::ChebyshevGrid(double lo, double hi, int n) : lo_(lo), hi_(hi) {
  if (n < 2) throw ParameterError("ChebyshevGrid: n < 2");
  nodes_.resize(n);
  weights_.resize(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    nodes_[i] = mid - half * std::cos(std::numbers::pi * i / (n - 1));
    weights_[i] = (i % 2 == 0) ? 1.0 : -1.0;
  }
  weights_.front() *= 0.5;
  weights_.back() *= 0.5;
}

void ChebyshevGrid::basis(double x, double* coef) const {
  const int n = size();
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x - nodes_[i];
    if (dx == 0.0) {
      std::fill(coef, coef + n, 0.0);
      coef[i] = 1.0;
      return;
    }
    coef[i] = weights_[i] / dx;
    denom += coef[i];
  }
  const double inv = 1.0 / denom;
  for (int i = 0; i < n; ++i) coef[i] *= inv;
}

}  // namespace eep
