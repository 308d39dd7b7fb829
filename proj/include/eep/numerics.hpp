#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "eep/errors.hpp"

namespace eep {

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return x > lo && x < hi; }
};

// Nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n);

struct QuadratureRule {
  int nodes = 64;
  int panels = 1;
};

template <class F>
double integrate(F&& f, double a, double b, const QuadratureRule& rule = {}) {
  if (!(a <= b)) throw ParameterError("integrate: a > b");
  if (a == b) return 0.0;
  const GaussLegendre& gl = gauss_legendre(rule.nodes);
  const double width = (b - a) / rule.panels;
  double total = 0.0;
  for (int p = 0; p < rule.panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    const double mid = lo + half;
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double x = mid + half * gl.x[i];
      const double v = f(x);
      if (!std::isfinite(v)) throw EvaluationError("non-finite integrand", x);
      acc += gl.w[i] * v;
    }
    total += half * acc;
  }
  return total;
}

struct RootBracket {
  double lo;
  double hi;
  double tol_abs = 1e-12;
  int max_iter = 200;
};

struct RootResult {
  double x;
  double lo;
  double hi;
  int iterations;
};

// Brent-style bracketed root finder; the final bracket [lo, hi] has width <= tol_abs.
RootResult solve_root_bracketed(const std::function<double(double)>& f, const RootBracket& br);

inline double solve_root(const std::function<double(double)>& f, const RootBracket& br) {
  return solve_root_bracketed(f, br).x;
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x);

// Natural-free cubic interpolation through four neighbouring knots on a uniform grid.
double interp_cubic_uniform(double x0, double h, std::span<const double> ys, double x);

inline double norm_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

template <class F>
double central_first(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class F>
double central_second(F&& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Barycentric interpolation on Chebyshev points of the second kind.
class ChebyshevGrid {
 public:
  ChebyshevGrid() = default;
  ChebyshevGrid(double lo, double hi, int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  // Fills coef so that f(x) ~ sum coef[i] * f_i; coef must hold size() entries.
  void basis(double x, double* coef) const;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace eep
