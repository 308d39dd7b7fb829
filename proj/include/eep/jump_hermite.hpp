#pragma once

#include <memory>
#include <vector>

#include "eep/hermite.hpp"

namespace eep {

struct JumpExpansionConfig {
  ExpansionConfig diffusion;
  int jump_nodes = 64;       // Gauss-Legendre nodes per jump-integral panel
  double fd_step = 1e-3;     // central-difference step in x and in w
  int conv_points = 4097;    // tabulated jump-size self-convolution
};

class JumpDensityExpansion;

// One source point x0 with its diffusion coefficients tabulated.
class JumpSourceKernel {
 public:
  double x0() const { return x0_; }
  // Log-price density after dt; negative truncations are clamped and counted.
  double density(double x, double dt, long* clamps = nullptr) const;

 private:
  friend class JumpDensityExpansion;
  const JumpDensityExpansion* owner_ = nullptr;
  SourceKernel diff_;
  double x0_ = 0.0;
  double y0_ = 0.0;
};

// Transition density of the log price x = log S under diffusion plus compound-Poisson jumps.
class JumpDensityExpansion {
 public:
  JumpDensityExpansion(const JumpModel& model, double anchor_x, int order,
                       JumpExpansionConfig config = {});

  int order() const { return order_; }
  double intensity() const { return rho_; }
  const JumpModel& model() const { return model_; }
  const LampertiTransform& transform() const { return *transform_; }
  const JumpExpansionConfig& config() const { return config_; }

  // w_B(x, x_to) = int_{x_to}^{x} ds / sigma(s).
  double w_B(double x, double x_to) const;
  double c_minus1(double x, double x_to) const;
  double c0(double x, double x_to) const;
  // C^(k+1) by the direct recursion.
  double ck_next(int k, double x, double x_to) const;
  double d1(double x, double x_to) const;
  // D^(k+1); supported for k <= 1.
  double dk_next(int k, double x, double x_to) const;
  // Gaussian even moment M_{2r} = (2r-1)!!.
  static double gaussian_moment(int r);

  // Reference evaluation from the recursions above.
  double jump_density(double x_to, double x_from, double dt) const;

  // Tabulated evaluation for a fixed source and gaps up to max_gap.
  JumpSourceKernel kernel(double x_from, double max_gap) const;

  double jump_pdf(double z) const { return model_.jumps.log_jump_density(z); }
  // (v * v)(z), tabulated and direct.
  double jump_conv(double z) const;
  double jump_conv_direct(double z) const;
  // Panel edges covering the jump support, split at kinks of v(c) and v(z - c).
  std::vector<double> jump_panels(double shift) const;

 private:
  friend class JumpSourceKernel;
  double ck(int k, double x, double x_to) const;
  double drift_integral(double y_from, double y_to) const;
  double generator(const std::function<double(double)>& f, double x) const;
  double m0(double x, double x_to, double w) const;
  double d2(double x, double x_to, bool tabulated) const;

  JumpModel model_;
  std::shared_ptr<const LampertiTransform> transform_;
  DensityExpansion diffusion_;
  int order_;
  JumpExpansionConfig config_;
  double rho_;
  double conv_lo_ = 0.0;
  double conv_h_ = 0.0;
  std::vector<double> conv_;
  // Constant log-price coefficients make D^(2) a function of x_to - x alone.
  bool invariant_ = false;
  double anchor_x_ = 0.0;
  std::vector<double> d2_tab_;
};

}  // namespace eep
