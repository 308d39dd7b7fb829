#pragma once

#include <array>
#include <memory>
#include <vector>

#include "eep/lamperti.hpp"

namespace eep {

struct ExpansionConfig {
  int coeff_nodes = 32;  // Gauss-Legendre nodes for the c_j integrals
  int table_nodes = 40;  // Chebyshev nodes of a source kernel
};

constexpr int kMaxOrder = 3;

// Coefficients of the expansion at one target point, seen from a fixed source.
struct KernelPoint {
  double A = 0.0;     // int_{y0}^{y} mu_Y
  double log_s = 0.0; // log gamma_inv(y), or gamma_inv(y) itself on the real line
  std::array<double, kMaxOrder + 1> c{1.0, 0.0, 0.0, 0.0};
};

// Source-fixed tabulation of the expansion coefficients over an interval of targets.
class SourceKernel {
 public:
  double y0() const { return y0_; }
  double state0() const { return s0_; }
  int order() const { return order_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  KernelPoint point(double y) const;
  double state(double y) const;

  // Transition density in y; negative truncations are clamped to zero and counted.
  double density_y(double y, double dt, long* clamps = nullptr) const;
  double density_y(const KernelPoint& kp, double y, double dt, long* clamps = nullptr) const;
  double log_density_y(double y, double dt) const;

 private:
  friend class DensityExpansion;
  int order_ = 0;
  int n_ = 0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double y0_ = 0.0;
  double s0_ = 0.0;
  bool log_state_ = true;
  // Chebyshev coefficients: series 0 = A, 1 = state, 2.. = c_1..c_m.
  std::vector<double> coef_;
  int series_ = 0;
};

class DensityExpansion {
 public:
  DensityExpansion(std::shared_ptr<const LampertiTransform> transform, int order,
                   ExpansionConfig config = {});

  int order() const { return order_; }
  const LampertiTransform& transform() const { return *transform_; }
  std::shared_ptr<const LampertiTransform> transform_ptr() const { return transform_; }
  const ExpansionConfig& config() const { return config_; }

  // Direct recursion for c_j(y | y0), second derivatives by nested central differences.
  double coeff_c(int j, double y0, double y) const;

  // Reference evaluation built on coeff_c.
  double density(double S_to, double S_from, double dt) const;
  double log_density(double S_to, double S_from, double dt) const;

  // Tabulated coefficients for one source over targets y in [y_lo, y_hi].
  SourceKernel kernel(double S_from, double y_lo, double y_hi) const;

 private:
  double drift_integral(double y0, double y) const;
  double log_series_and_gauss(double S_to, double S_from, double dt, double* series) const;

  std::shared_ptr<const LampertiTransform> transform_;
  int order_;
  ExpansionConfig config_;
};

std::shared_ptr<const LampertiTransform> make_transform(const DiffusionSpec& spec, double anchor);

}  // namespace eep
