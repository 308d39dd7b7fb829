#include "eep/eep_solver.hpp"

#include <algorithm>
#include <cmath>

#include "eep/oracles.hpp"

namespace eep {

void PutContract::validate() const {
  if (!(strike > 0.0 && std::isfinite(strike))) throw ParameterError("contract: strike must be positive");
  if (!(maturity > 0.0 && std::isfinite(maturity))) throw ParameterError("contract: maturity must be positive");
  if (!(spot > 0.0 && std::isfinite(spot))) throw ParameterError("contract: spot must be positive");
}

double BoundaryGrid::at_time(double t) const {
  if (values.empty()) throw RangeError("boundary grid is empty");
  int n = static_cast<int>(std::floor(t / dt + 1e-9));
  n = std::clamp(n, 0, n_steps);
  return values[n];
}

double terminal_boundary(const DiffusionSpec& spec, double K) {
  const double d = spec.delta(K);
  if (d <= 0.0) return K;
  return std::min(K, spec.r(K) / d * K);
}

double eps_term(const TransitionLaw& law, const SourceLaw& src, double S_from, double gap,
                double B_to, int to, long* clamps) {
  if (gap > 0.0) return src.eps(gap, B_to, to, clamps);
  // Point mass at S_from; half weight when it sits on the boundary itself.
  if (S_from < B_to) return law.flow(S_from, to);
  if (S_from == B_to) return 0.5 * law.flow(S_from, to);
  return 0.0;
}

double eps_sum_serial(const TransitionLaw& law, const SourceLaw& src, double S_from, int l,
                      const BoundaryGrid& grid, long* clamps) {
  const int N = grid.n_steps;
  double total = 0.0;
  for (int q = l; q <= N; ++q) {
    const double w = (q == l || q == N) ? 0.5 : 1.0;
    total += w * eps_term(law, src, S_from, (q - l) * grid.dt, grid.values[q], q, clamps);
  }
  return total;
}

double eps_sum_parallel(const TransitionLaw& law, const SourceLaw& src, double S_from, int l,
                        const BoundaryGrid& grid, long* clamps) {
  const int N = grid.n_steps;
  const int count = N - l + 1;
  std::vector<double> terms(count);
  std::vector<long> clamp_counts(count, 0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    const int q = l + i;
    terms[i] = eps_term(law, src, S_from, i * grid.dt, grid.values[q], q, &clamp_counts[i]);
  }
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    const int q = l + i;
    const double w = (q == l || q == N) ? 0.5 : 1.0;
    total += w * terms[i];
    if (clamps) *clamps += clamp_counts[i];
  }
  return total;
}

namespace {

class ExpansionSource : public SourceLaw {
 public:
  ExpansionSource(SourceKernel kernel, const DiffusionSpec& spec, const LampertiTransform& tr,
                  double K, double rate, double y_strike, double y_floor, double trunc, int nodes)
      : k_(std::move(kernel)), spec_(spec), tr_(tr), K_(K), rate_(rate), y_strike_(y_strike),
        y_floor_(y_floor), trunc_(trunc), gl_(gauss_legendre(nodes)) {}

  double european(double tau, long* clamps) const override {
    const double y0 = k_.y0();
    const double a = std::max(y0 - trunc_ * std::sqrt(tau), y_floor_);
    const double b = std::min(y_strike_, y0 + trunc_ * std::sqrt(tau));
    if (!(b > a)) return 0.0;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl_.x.size(); ++i) {
      const double y = mid + half * gl_.x[i];
      const KernelPoint kp = k_.point(y);
      acc += gl_.w[i] * (K_ - std::exp(kp.log_s)) * k_.density_y(kp, y, tau, clamps);
    }
    return std::exp(-rate_ * tau) * half * acc;
  }

  double eps(double gap, double B_to, int, long* clamps) const override {
    const double y0 = k_.y0();
    const double a = std::max(y0 - trunc_ * std::sqrt(gap), y_floor_);
    const double b = std::min(tr_.gamma(B_to), y0 + trunc_ * std::sqrt(gap));
    if (!(b > a)) return 0.0;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl_.x.size(); ++i) {
      const double y = mid + half * gl_.x[i];
      const KernelPoint kp = k_.point(y);
      const double S = std::exp(kp.log_s);
      acc += gl_.w[i] * (rate_ * K_ - spec_.delta(S)) * k_.density_y(kp, y, gap, clamps);
    }
    return std::exp(-rate_ * gap) * half * acc;
  }

 private:
  SourceKernel k_;
  const DiffusionSpec& spec_;
  const LampertiTransform& tr_;
  double K_, rate_, y_strike_, y_floor_, trunc_;
  const GaussLegendre& gl_;
};

class GbmSource : public SourceLaw {
 public:
  GbmSource(const GbmParams& p, double K, double S) : p_(p), K_(K), S_(S) {}

  double european(double tau, long*) const override { return bs_put(S_, K_, p_.r, 0.0, p_.sigma, tau); }

  double eps(double gap, double B_to, int, long*) const override {
    const double rho2 = p_.r - 0.5 * p_.sigma * p_.sigma;
    const double b2 = (std::log(B_to / S_) - rho2 * gap) / (p_.sigma * std::sqrt(gap));
    return p_.r * K_ * std::exp(-p_.r * gap) * norm_cdf(b2);
  }

 private:
  GbmParams p_;
  double K_, S_;
};

}  // namespace

ExpansionLaw::ExpansionLaw(const DensityExpansion& expansion, const PutContract& contract,
                           const SolverConfig& config)
    : expansion_(expansion), contract_(contract), config_(config) {
  contract_.validate();
  const LampertiTransform& tr = expansion_.transform();
  rate_ = tr.spec().rate;
  y_strike_ = tr.gamma(contract_.strike);
  const double floor_state = config_.lower_eps_rel * contract_.strike;
  y_floor_ = tr.spec().domain.contains(floor_state) ? tr.gamma(floor_state) : tr.y_range().lo;
  y_floor_ = std::max(y_floor_, tr.y_range().lo);
}

std::unique_ptr<SourceLaw> ExpansionLaw::from(double S, double max_gap) const {
  const LampertiTransform& tr = expansion_.transform();
  const double y0 = tr.gamma(S);
  const double reach = config_.trunc_sd * std::sqrt(max_gap);
  const double lo = std::max(y0 - reach, y_floor_);
  const double hi = std::max(std::min(y_strike_, y0 + reach), lo);
  return std::make_unique<ExpansionSource>(expansion_.kernel(S, lo, hi), tr.spec(), tr,
                                           contract_.strike, rate_, y_strike_, y_floor_,
                                           config_.trunc_sd, config_.quad_nodes);
}

double ExpansionLaw::flow(double S, int) const {
  return rate_ * contract_.strike - expansion_.transform().spec().delta(S);
}

GbmExactLaw::GbmExactLaw(const GbmParams& params, const PutContract& contract)
    : params_(params), contract_(contract) {
  params_.validate();
  contract_.validate();
  if (params_.delta != 0.0) throw ParameterError("closed-form kernels require delta = 0");
}

std::unique_ptr<SourceLaw> GbmExactLaw::from(double S, double) const {
  return std::make_unique<GbmSource>(params_, contract_.strike, S);
}

BoundaryGrid solve_boundary(const TransitionLaw& law, const PutContract& contract, int N,
                            double terminal, const SolverConfig& config, Diagnostics* diag) {
  contract.validate();
  if (N < 2) throw ParameterError("solve_boundary: N must be at least 2");
  const double K = contract.strike;
  BoundaryGrid grid;
  grid.n_steps = N;
  grid.dt = contract.maturity / N;
  grid.values.assign(N + 1, terminal);
  const double tol = config.root_tol_rel * K;
  const double dt = grid.dt;
  Diagnostics local;
  law.boundary_fixed(N, terminal);

  for (int l = N - 1; l >= 0; --l) {
    const double tau = (N - l) * dt;
    auto residual = [&](double b) {
      auto src = law.from(b, tau);
      ++local.kernels;
      long clamps = 0;
      grid.values[l] = b;
      const double sum = config.parallel ? eps_sum_parallel(law, *src, b, l, grid, &clamps)
                                         : eps_sum_serial(law, *src, b, l, grid, &clamps);
      const double eur = src->european(tau, &clamps);
      local.clamps += clamps;
      return K - b - eur - dt * sum;
    };

    // Scan downward from the strike for the largest sign change.
    double hi = K;
    double f_hi = residual(hi);
    if (f_hi >= 0.0) {
      grid.values[l] = K;
      law.boundary_fixed(l, K);
      continue;
    }
    const double prev = grid.values[l + 1];
    double step = (l + 2 <= N) ? std::max(2.0 * std::abs(grid.values[l + 1] - grid.values[std::min(l + 2, N)]), 1e-5 * K)
                               : 1e-4 * K;
    double x = prev < K ? prev : K - step;
    double f_x = residual(x);
    if (f_x < 0.0) {
      while (true) {
        hi = x;
        f_hi = f_x;
        x = hi - step;
        step *= 2.0;
        if (x < 1e-4 * K) x = 1e-4 * K;
        f_x = residual(x);
        if (f_x >= 0.0) break;
        if (x <= 1e-4 * K) {
          x = 1e-8 * K;
          f_x = residual(x);
          if (f_x >= 0.0) break;
          throw BoundaryError("boundary solve: no sign change at step " + std::to_string(l), l, f_x, f_hi);
        }
      }
    }
    RootResult rr;
    try {
      rr = solve_root_bracketed(residual, {x, hi, tol, 200});
    } catch (const BracketError& e) {
      throw BoundaryError("boundary solve: no sign change at step " + std::to_string(l), l, e.f_lo, e.f_hi);
    }
    local.root_iterations += rr.iterations;
    grid.values[l] = rr.x;
    law.boundary_fixed(l, rr.x);
  }
  if (diag) {
    diag->clamps += local.clamps;
    diag->root_iterations += local.root_iterations;
    diag->kernels += local.kernels;
  }
  return grid;
}

PricingResult price(const TransitionLaw& law, const PutContract& contract, int N, double terminal,
                    const SolverConfig& config) {
  PricingResult res;
  res.boundary = solve_boundary(law, contract, N, terminal, config, &res.diagnostics);
  const double S0 = contract.spot;
  const double K = contract.strike;
  auto src = law.from(S0, contract.maturity);
  long clamps = 0;
  res.european = src->european(contract.maturity, &clamps);
  if (S0 <= res.boundary.values[0]) {
    res.price = K - S0;
    res.premium = res.price - res.european;
  } else {
    const double sum = config.parallel ? eps_sum_parallel(law, *src, S0, 0, res.boundary, &clamps)
                                       : eps_sum_serial(law, *src, S0, 0, res.boundary, &clamps);
    res.premium = res.boundary.dt * sum;
    res.price = res.european + res.premium;
  }
  res.diagnostics.clamps += clamps;
  res.diagnostics.panels = 1;
  return res;
}

DensityExpansion make_expansion(const DiffusionSpec& spec, double strike, int order,
                                ExpansionConfig config) {
  return DensityExpansion(make_transform(spec, strike), order, config);
}

double european_put(const DensityExpansion& expansion, const PutContract& contract, double t,
                    double S_t, const SolverConfig& config) {
  if (!(t >= 0.0 && t < contract.maturity)) throw ParameterError("european_put: t outside [0, T)");
  ExpansionLaw law(expansion, contract, config);
  const double tau = contract.maturity - t;
  long clamps = 0;
  return law.from(S_t, tau)->european(tau, &clamps);
}

double eep_integrand_eps(const DensityExpansion& expansion, const PutContract& contract,
                         double s_gap, double B_from, double B_to, const SolverConfig& config) {
  if (s_gap < 0.0) throw ParameterError("eps: negative gap");
  ExpansionLaw law(expansion, contract, config);
  long clamps = 0;
  auto src = law.from(B_from, std::max(s_gap, 1e-12));
  return eps_term(law, *src, B_from, s_gap, B_to, 0, &clamps);
}

BoundaryGrid solve_boundary(const DensityExpansion& expansion, const PutContract& contract, int N,
                            const SolverConfig& config) {
  ExpansionLaw law(expansion, contract, config);
  return solve_boundary(law, contract, N,
                        terminal_boundary(expansion.transform().spec(), contract.strike), config,
                        nullptr);
}

PricingResult price(const DensityExpansion& expansion, const PutContract& contract, int N,
                    const SolverConfig& config) {
  ExpansionLaw law(expansion, contract, config);
  return price(law, contract, N, terminal_boundary(expansion.transform().spec(), contract.strike),
               config);
}

PricingResult gbm_closed_form_price(const GbmParams& params, const PutContract& contract, int N,
                                    const SolverConfig& config) {
  GbmExactLaw law(params, contract);
  return price(law, contract, N, contract.strike, config);
}

}  // namespace eep
