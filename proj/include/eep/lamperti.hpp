#pragma once

#include <vector>

#include "eep/models.hpp"

namespace eep {

// Unit-diffusion change of variable y = gamma(S) = int_anchor^S du / sigma(u).
class LampertiTransform {
 public:
  LampertiTransform(DiffusionSpec spec, double anchor);

  double gamma(double S) const;
  double gamma_inv(double y) const;
  double mu_Y(double y) const;
  double dmu_Y(double y) const;
  double lambda_Y(double y) const;

  // Same quantities when the state S = gamma_inv(y) is already known.
  double mu_Y_state(double S) const;
  double lambda_Y_state(double S, double y) const;

  // Image of the usable state range; generic models are restricted to [1e-12, 1e12] x anchor.
  Interval y_range() const { return y_range_; }
  const DiffusionSpec& spec() const { return spec_; }
  double anchor() const { return anchor_; }
  bool has_closed_form() const { return spec_.closed_form.has_value(); }

 private:
  double integrate_inv_sigma(double a, double b) const;
  double raw_gamma(double S) const;

  DiffusionSpec spec_;
  double anchor_;
  double offset_ = 0.0;
  bool log_knots_ = true;
  std::vector<double> knot_s_;
  std::vector<double> knot_g_;
  Interval y_range_{0.0, 0.0};
  Interval s_range_{0.0, 0.0};
};

}  // namespace eep
