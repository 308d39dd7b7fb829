#include "eep/models.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace eep {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

void require_rates(double r, double delta) {
  require(std::isfinite(r) && std::isfinite(delta), "rates must be finite");
  require(r < 1.0, "r must be a decimal rate below 1");
}

LampertiForms gbm_forms(double r, double delta, double sigma) {
  const double drift = (r - delta) / sigma - 0.5 * sigma;
  return LampertiForms{
      [sigma](double s) { return std::log(s) / sigma; },
      [sigma](double g) { return std::exp(sigma * g); },
      [drift](double) { return drift; },
      [](double) { return 0.0; },
  };
}

}  // namespace

void GbmParams::validate() const {
  require_rates(r, delta);
  require(sigma > 0.0 && std::isfinite(sigma), "GBM: sigma must be positive");
}

void CevParams::validate() const {
  require_rates(r, delta);
  require(sigma > 0.0 && std::isfinite(sigma), "CEV: sigma must be positive");
  require(std::isfinite(alpha), "CEV: alpha must be finite");
}

void NmrParams::validate() const {
  require_rates(r, delta);
  require(sigma > 0.0 && std::isfinite(sigma), "NMR: sigma must be positive");
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(v) &&
              std::isfinite(gamma),
          "NMR: coefficients must be finite");
  require(delta == 0.0, "NMR: the drift is given directly, delta must be 0");
}

void MertonParams::validate() const {
  require_rates(r, delta);
  require(sigma > 0.0 && std::isfinite(sigma), "Merton: sigma must be positive");
  require(lambda >= 0.0 && std::isfinite(lambda), "Merton: lambda must be nonnegative");
  require(sigma_J >= 0.0 && std::isfinite(sigma_J), "Merton: sigma_J must be nonnegative");
  require(std::isfinite(mu_J), "Merton: mu_J must be finite");
}

void KouParams::validate() const {
  require_rates(r, delta);
  require(sigma > 0.0 && std::isfinite(sigma), "Kou: sigma must be positive");
  require(lambda >= 0.0 && std::isfinite(lambda), "Kou: lambda must be nonnegative");
  require(eta1 > 1.0, "Kou: eta1 must exceed 1");
  require(eta2 > 0.0, "Kou: eta2 must be positive");
  require(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0, "Kou: p, q must lie in [0, 1]");
  require(std::abs(p + q - 1.0) < 1e-12, "Kou: p + q must equal 1");
}

DiffusionSpec build_gbm(const GbmParams& p) {
  p.validate();
  const double r = p.r, d = p.delta, s = p.sigma;
  DiffusionSpec spec;
  spec.name = "gbm";
  spec.mu = [r, d](double x) { return (r - d) * x; };
  spec.sigma = [s](double x) { return s * x; };
  spec.sigma_prime = [s](double) { return s; };
  spec.r = [r](double x) { return r * x; };
  spec.delta = [d](double x) { return d * x; };
  spec.rate = r;
  spec.closed_form = gbm_forms(r, d, s);
  return spec;
}

DiffusionSpec build_cev(const CevParams& p) {
  p.validate();
  const double r = p.r, d = p.delta, s = p.sigma, beta = 0.5 * p.alpha;
  DiffusionSpec spec;
  spec.name = "cev";
  spec.mu = [r, d](double x) { return (r - d) * x; };
  spec.sigma = [s, beta](double x) { return s * std::pow(x, beta); };
  spec.sigma_prime = [s, beta](double x) { return s * beta * std::pow(x, beta - 1.0); };
  spec.r = [r](double x) { return r * x; };
  spec.delta = [d](double x) { return d * x; };
  spec.rate = r;
  if (beta == 1.0) {
    spec.closed_form = gbm_forms(r, d, s);
    return spec;
  }
  const double k = 1.0 - beta;
  spec.closed_form = LampertiForms{
      [s, k](double x) { return std::pow(x, k) / (s * k); },
      [s, k](double g) { return std::pow(s * k * g, 1.0 / k); },
      [r, d, s, k, beta](double x) {
        return (r - d) * std::pow(x, k) / s - 0.5 * s * beta * std::pow(x, -k);
      },
      [r, d, s, k, beta](double x) {
        return (r - d) * k - 0.5 * s * s * beta * (beta - 1.0) * std::pow(x, -2.0 * k);
      },
  };
  return spec;
}

DiffusionSpec build_nmr(const NmrParams& p) {
  p.validate();
  const double a = p.a, b = p.b, c = p.c, v = p.v, s = p.sigma, g = p.gamma, r = p.r;
  DiffusionSpec spec;
  spec.name = "nmr";
  spec.mu = [=](double x) { return a / x + b + c * x + v * x * x; };
  spec.sigma = [s, g](double x) { return s * std::pow(x, g); };
  spec.sigma_prime = [s, g](double x) { return s * g * std::pow(x, g - 1.0); };
  spec.r = [r](double x) { return r * x; };
  spec.delta = [=](double x) { return r * x - (a / x + b + c * x + v * x * x); };
  spec.rate = r;
  return spec;
}

JumpSpec build_merton_jumps(const MertonParams& p) {
  p.validate();
  const double m = p.mu_J, sj = p.sigma_J;
  JumpSpec j;
  j.name = "merton";
  j.intensity = p.lambda;
  j.mean_relative_jump = std::exp(m + 0.5 * sj * sj) - 1.0;
  if (sj > 0.0) {
    j.log_jump_density = [m, sj](double z) { return norm_pdf((z - m) / sj) / sj; };
    j.support = {m - 8.0 * sj, m + 8.0 * sj};
    j.sample = [m, sj](std::mt19937_64& g) { return std::normal_distribution<double>(m, sj)(g); };
  } else {
    j.log_jump_density = [](double) { return 0.0; };
    j.support = {m, m};
    j.sample = [m](std::mt19937_64&) { return m; };
  }
  return j;
}

JumpSpec build_kou_jumps(const KouParams& p) {
  p.validate();
  const double pp = p.p, qq = p.q, e1 = p.eta1, e2 = p.eta2;
  JumpSpec j;
  j.name = "kou";
  j.intensity = p.lambda;
  j.mean_relative_jump = pp * e1 / (e1 - 1.0) + qq * e2 / (e2 + 1.0) - 1.0;
  j.log_jump_density = [=](double z) {
    return z >= 0.0 ? pp * e1 * std::exp(-e1 * z) : qq * e2 * std::exp(e2 * z);
  };
  // Each side leaves at most 5e-9 of mass outside the support.
  const double cut = 5e-9;
  j.support = {qq > cut ? -std::log(qq / cut) / e2 : 0.0, pp > cut ? std::log(pp / cut) / e1 : 0.0};
  j.breakpoints = {0.0};
  j.sample = [=](std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double e = std::exponential_distribution<double>(1.0)(g);
    return u(g) < pp ? e / e1 : -e / e2;
  };
  return j;
}

KouMoments kou_moments(const KouParams& k) {
  k.validate();
  const double p = k.p, q = k.q, e1 = k.eta1, e2 = k.eta2;
  KouMoments m;
  m.phi1 = p / e1 - q / e2;
  m.phi2 = p * q * std::pow(1.0 / e1 + 1.0 / e2, 2) + p / (e1 * e1) + q / (e2 * e2);
  const double num = 2.0 * (p * p * p - 1.0) * e1 * e1 * e1 - 2.0 * (q * q * q - 1.0) * e2 * e2 * e2 +
                     6.0 * p * q * e1 * e2 * (q * e2 - p * e1);
  const double den = std::pow(p * e2 * e2 + q * e1 * e1 + p * q * std::pow(e1 + e2, 2), 1.5);
  m.phi3 = num / den;
  return m;
}

DiffusionSpec with_numeric_sigma_prime(DiffusionSpec spec) {
  std::clog << "warning: " << spec.name
            << ": sigma_prime approximated by central differences\n";
  ScalarFn sig = spec.sigma;
  spec.sigma_prime = [sig](double x) {
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    return (sig(x + h) - sig(x - h)) / (2.0 * h);
  };
  return spec;
}

DiffusionSpec build_log_diffusion(double r, double delta, double sigma, double intensity,
                                  double mean_relative_jump) {
  require_rates(r, delta);
  require(sigma > 0.0, "log diffusion: sigma must be positive");
  const double drift = r - delta - intensity * mean_relative_jump - 0.5 * sigma * sigma;
  DiffusionSpec spec;
  spec.name = "log";
  spec.mu = [drift](double) { return drift; };
  spec.sigma = [sigma](double) { return sigma; };
  spec.sigma_prime = [](double) { return 0.0; };
  spec.r = [r](double) { return r; };
  spec.delta = [r, drift](double) { return r - drift; };
  spec.domain = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  spec.rate = r;
  const double dy = drift / sigma;
  spec.closed_form = LampertiForms{
      [sigma](double x) { return x / sigma; },
      [sigma](double g) { return sigma * g; },
      [dy](double) { return dy; },
      [](double) { return 0.0; },
  };
  return spec;
}

JumpModel build_merton_model(const MertonParams& p) {
  JumpModel m;
  m.jumps = build_merton_jumps(p);
  m.log_diffusion = build_log_diffusion(p.r, p.delta, p.sigma, p.lambda, m.jumps.mean_relative_jump);
  m.rate = p.r;
  m.dividend = p.delta;
  return m;
}

JumpModel build_kou_model(const KouParams& p) {
  JumpModel m;
  m.jumps = build_kou_jumps(p);
  m.log_diffusion = build_log_diffusion(p.r, p.delta, p.sigma, p.lambda, m.jumps.mean_relative_jump);
  m.rate = p.r;
  m.dividend = p.delta;
  return m;
}

}  // namespace eep
