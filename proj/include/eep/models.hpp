#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "eep/numerics.hpp"

namespace eep {

using ScalarFn = std::function<double(double)>;

// Closed forms a model may register for its unit-diffusion transform.
// All are functions of the original state S; the anchor offset is applied by the transform.
struct LampertiForms {
  ScalarFn antiderivative;  // G(S) with G' = 1/sigma
  ScalarFn inverse;         // G^{-1}
  ScalarFn drift_y;         // mu_Y expressed at S
  ScalarFn drift_y_slope;   // d mu_Y / dy expressed at S
};

struct DiffusionSpec {
  std::string name;
  ScalarFn mu;
  ScalarFn sigma;
  ScalarFn sigma_prime;
  ScalarFn r;      // absolute drift component r(S)
  ScalarFn delta;  // absolute payout component delta(S)
  Interval domain{0.0, std::numeric_limits<double>::infinity()};
  double rate = 0.0;  // constant discount rate
  std::optional<LampertiForms> closed_form;
};

struct JumpSpec {
  std::string name;
  double intensity = 0.0;
  ScalarFn log_jump_density;
  double mean_relative_jump = 0.0;
  Interval support{0.0, 0.0};
  // Points where the density is not smooth; quadrature panels split there.
  std::vector<double> breakpoints;
  std::function<double(std::mt19937_64&)> sample;
};

struct GbmParams {
  double r = 0.0488;
  double delta = 0.0;
  double sigma = 0.2;
  void validate() const;
  bool operator==(const GbmParams&) const = default;
};

struct CevParams {
  double r = 0.06;
  double delta = 0.03;
  double sigma = 0.632455532033676;
  double alpha = 1.9;
  void validate() const;
  bool operator==(const CevParams&) const = default;
};

struct NmrParams {
  double a = 500.0;
  double b = 5.0;
  double c = 0.05;
  double v = -0.05;
  double sigma = 0.2;
  double gamma = 1.5;
  double r = 0.05;
  double delta = 0.0;
  void validate() const;
  bool operator==(const NmrParams&) const = default;
};

struct MertonParams {
  double r = 0.0488;
  double delta = 0.0;
  double sigma = 0.2;
  double lambda = 0.1;
  double mu_J = 0.0;
  double sigma_J = 0.2;
  void validate() const;
  bool operator==(const MertonParams&) const = default;
};

struct KouParams {
  double r = 0.0488;
  double delta = 0.0;
  double sigma = 0.2;
  double lambda = 0.1;
  double p = 0.04;
  double q = 0.96;
  double eta1 = 3.7;
  double eta2 = 1.8;
  void validate() const;
  bool operator==(const KouParams&) const = default;
};

struct KouMoments {
  double phi1;
  double phi2;
  double phi3;
};

DiffusionSpec build_gbm(const GbmParams& p);
DiffusionSpec build_cev(const CevParams& p);
DiffusionSpec build_nmr(const NmrParams& p);
JumpSpec build_merton_jumps(const MertonParams& p);
JumpSpec build_kou_jumps(const KouParams& p);
KouMoments kou_moments(const KouParams& p);

// Fills sigma_prime by central differences when a model has no analytic derivative.
DiffusionSpec with_numeric_sigma_prime(DiffusionSpec spec);

// Jump-diffusion in log price x = log S: dx = (r - delta - rho*j - sigma^2/2) dt + sigma dW + z dq.
struct JumpModel {
  DiffusionSpec log_diffusion;
  JumpSpec jumps;
  double rate = 0.0;
  double dividend = 0.0;
};

DiffusionSpec build_log_diffusion(double r, double delta, double sigma, double intensity,
                                  double mean_relative_jump);
JumpModel build_merton_model(const MertonParams& p);
JumpModel build_kou_model(const KouParams& p);

}  // namespace eep
