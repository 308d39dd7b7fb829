#include "eep/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "eep/numerics.hpp"

namespace eep {

void OracleConfig::validate() const {
  if (binomial_steps < 1 || mc_paths < 2 || mc_time_steps < 1 || fd_space_steps < 1 ||
      fd_time_steps < 1) {
    throw ParameterError("oracle config: step and path counts must be positive");
  }
}

double bs_put(double S, double K, double r, double delta, double sigma, double tau) {
  if (K <= 0.0) return 0.0;
  if (tau <= 0.0) return std::max(K - S, 0.0);
  const double df = std::exp(-r * tau), dq = std::exp(-delta * tau);
  const double sd = sigma * std::sqrt(tau);
  if (sd < 1e-14) return std::max(K * df - S * dq, 0.0);
  const double d1 = (std::log(S / K) + (r - delta + 0.5 * sigma * sigma) * tau) / sd;
  const double d2 = d1 - sd;
  return K * df * norm_cdf(-d2) - S * dq * norm_cdf(-d1);
}

double black_scholes_put(const GbmParams& params, const PutContract& contract) {
  params.validate();
  return bs_put(contract.spot, contract.strike, params.r, params.delta, params.sigma,
                contract.maturity);
}

double lognormal_density(const GbmParams& params, double S_to, double S_from, double dt) {
  if (!(S_to > 0.0)) return 0.0;
  const double s = params.sigma * std::sqrt(dt);
  const double m = std::log(S_from) + (params.r - params.delta - 0.5 * params.sigma * params.sigma) * dt;
  return norm_pdf((std::log(S_to) - m) / s) / (s * S_to);
}

namespace {

struct Tree {
  double u, d, p, disc;
};

Tree make_tree(const GbmParams& params, double T, int steps) {
  if (steps < 1) throw ParameterError("binomial: steps must be at least 1");
  const double dt = T / steps;
  Tree t;
  t.u = std::exp(params.sigma * std::sqrt(dt));
  t.d = 1.0 / t.u;
  t.disc = std::exp(-params.r * dt);
  const double growth = std::exp((params.r - params.delta) * dt);
  if (t.u == t.d) {
    t.p = 0.5;
  } else {
    t.p = (growth - t.d) / (t.u - t.d);
  }
  if (!(t.p >= 0.0 && t.p <= 1.0)) throw ParameterError("binomial: risk-neutral probability outside [0,1]");
  return t;
}

// Backward induction from the terminal layer down to layer `stop`; node j of layer i is
// root * u^(2j - i). Calls on_layer(i, values) after each layer is formed.
template <class OnLayer>
std::vector<double> crr_backward(const Tree& t, double root, double K, int last, int stop,
                                 bool parallel, OnLayer on_layer) {
  std::vector<double> v(last + 1), next(last + 1);
  const double lu = std::log(t.u);
  for (int j = 0; j <= last; ++j) v[j] = std::max(K - root * std::exp((2 * j - last) * lu), 0.0);
  on_layer(last, v);
  const double pu = t.disc * t.p, pd = t.disc * (1.0 - t.p);
  for (int i = last - 1; i >= stop; --i) {
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j <= i; ++j) {
      const double cont = pu * v[j + 1] + pd * v[j];
      const double ex = K - root * std::exp((2 * j - i) * lu);
      next[j] = std::max(cont, ex);
    }
    std::swap(v, next);
    v.resize(i + 1);
    next.resize(i + 1);
    on_layer(i, v);
  }
  return v;
}

}  // namespace

double crr_binomial_put(const GbmParams& params, const PutContract& contract, int steps) {
  params.validate();
  contract.validate();
  const Tree t = make_tree(params, contract.maturity, steps);
  auto v = crr_backward(t, contract.spot, contract.strike, steps, 0, false, [](int, const auto&) {});
  return v[0];
}

double crr_binomial_put_parallel(const GbmParams& params, const PutContract& contract, int steps) {
  params.validate();
  contract.validate();
  const Tree t = make_tree(params, contract.maturity, steps);
  auto v = crr_backward(t, contract.spot, contract.strike, steps, 0, true, [](int, const auto&) {});
  return v[0];
}

BoundaryGrid binomial_implied_boundary(const GbmParams& params, const PutContract& contract,
                                       int steps, int grid_steps) {
  params.validate();
  contract.validate();
  if (grid_steps < 1) throw ParameterError("binomial boundary: grid_steps must be positive");
  const double K = contract.strike;
  const Tree t = make_tree(params, contract.maturity, steps);
  // Root the tree at the strike, far enough before time zero that every layer
  // spans the boundary.
  const double lu = std::log(t.u);
  const int warm = static_cast<int>(std::ceil(1.5 / lu));
  const int last = warm + steps;
  std::vector<double> layer_boundary(steps + 1, K);
  crr_backward(t, K, K, last, warm, false, [&](int i, const std::vector<double>& v) {
    const int n = i - warm;
    if (n == steps) return;
    // Largest node where the stored value equals intrinsic.
    double b = 0.0;
    for (int j = i; j >= 0; --j) {
      const double S = K * std::exp((2 * j - i) * lu);
      const double ex = K - S;
      if (ex <= 0.0) continue;
      if (v[j] <= ex) {
        b = S;
        break;
      }
    }
    layer_boundary[n] = b;
  });
  BoundaryGrid g;
  g.n_steps = grid_steps;
  g.dt = contract.maturity / grid_steps;
  g.values.resize(grid_steps + 1);
  for (int n = 0; n <= grid_steps; ++n) {
    const int i = static_cast<int>(std::floor(static_cast<double>(n) * steps / grid_steps + 1e-9));
    g.values[n] = layer_boundary[std::min(i, steps)];
  }
  g.values[grid_steps] = K;
  return g;
}

double merton_series_put(const MertonParams& params, const PutContract& contract, int n_terms) {
  params.validate();
  contract.validate();
  if (n_terms < 1) throw ParameterError("merton series: n_terms must be positive");
  const double T = contract.maturity;
  const double k = std::exp(params.mu_J + 0.5 * params.sigma_J * params.sigma_J) - 1.0;
  const double lam = params.lambda * (1.0 + k) * T;
  if (lam == 0.0) return black_scholes_put({params.r, params.delta, params.sigma}, contract);
  double total = 0.0;
  for (int n = 0; n < n_terms; ++n) {
    const double logw = -lam + n * std::log(lam) - std::lgamma(n + 1.0);
    const double w = std::exp(logw);
    if (w < 1e-14 && n > lam) break;
    const double sig = std::sqrt(params.sigma * params.sigma + n * params.sigma_J * params.sigma_J / T);
    const double rn = params.r - params.lambda * k + n * std::log1p(k) / T;
    total += w * bs_put(contract.spot, contract.strike, rn, params.delta, sig, T);
  }
  return total;
}

double merton_mixture_density(const MertonParams& params, double x_to, double x_from, double dt) {
  params.validate();
  const double k = std::exp(params.mu_J + 0.5 * params.sigma_J * params.sigma_J) - 1.0;
  const double drift = (params.r - params.delta - params.lambda * k - 0.5 * params.sigma * params.sigma) * dt;
  const double lam = params.lambda * dt;
  double total = 0.0;
  for (int n = 0; n < 400; ++n) {
    const double w = lam == 0.0 ? (n == 0 ? 1.0 : 0.0)
                                : std::exp(-lam + n * std::log(lam) - std::lgamma(n + 1.0));
    if (w < 1e-16 && n > lam) break;
    const double var = params.sigma * params.sigma * dt + n * params.sigma_J * params.sigma_J;
    const double sd = std::sqrt(var);
    total += w * norm_pdf((x_to - x_from - drift - n * params.mu_J) / sd) / sd;
  }
  return total;
}

namespace {

constexpr long kPairsPerBlock = 4096;

struct BlockSum {
  double sum = 0.0;
  double sum_sq = 0.0;
  long pairs = 0;
  long explosive = 0;
};

template <class PairFn>
McResult run_blocks(const OracleConfig& config, double discount, PairFn pair_payoffs) {
  config.validate();
  const long pairs = config.mc_paths / 2;
  const long n_blocks = (pairs + kPairsPerBlock - 1) / kPairsPerBlock;
  std::vector<BlockSum> blocks(n_blocks);
#pragma omp parallel for schedule(dynamic) if (config.parallel)
  for (long b = 0; b < n_blocks; ++b) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.mc_seed), static_cast<std::uint64_t>(b)};
    std::mt19937_64 gen(seq);
    const long count = std::min(kPairsPerBlock, pairs - b * kPairsPerBlock);
    BlockSum& s = blocks[b];
    for (long i = 0; i < count; ++i) {
      double a, c;
      if (!pair_payoffs(gen, a, c)) {
        s.explosive += 2;
        continue;
      }
      const double m = 0.5 * (a + c);
      s.sum += m;
      s.sum_sq += m * m;
      ++s.pairs;
    }
  }
  BlockSum tot;
  for (const BlockSum& s : blocks) {
    tot.sum += s.sum;
    tot.sum_sq += s.sum_sq;
    tot.pairs += s.pairs;
    tot.explosive += s.explosive;
  }
  McResult res;
  res.paths = 2 * pairs;
  res.explosive = tot.explosive;
  if (static_cast<double>(tot.explosive) > 1e-3 * static_cast<double>(res.paths)) {
    throw EvaluationError("monte carlo: too many explosive paths", static_cast<double>(tot.explosive));
  }
  if (tot.pairs < 2) throw EvaluationError("monte carlo: too few valid paths", 0.0);
  const double n = static_cast<double>(tot.pairs);
  const double mean = tot.sum / n;
  const double var = std::max(tot.sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  res.price = discount * mean;
  res.std_err = discount * std::sqrt(var / n);
  return res;
}

}  // namespace

McResult mc_european_put(const DiffusionSpec& spec, const PutContract& contract,
                         const OracleConfig& config) {
  contract.validate();
  const int steps = config.mc_time_steps;
  const double dt = contract.maturity / steps;
  const double sq = std::sqrt(dt);
  const double K = contract.strike, S0 = contract.spot;
  const double floor = spec.domain.lo;
  const bool absorb = std::isfinite(floor);
  auto simulate = [&](std::mt19937_64& gen, double& pa, double& pb) {
    std::normal_distribution<double> nd(0.0, 1.0);
    double a = S0, b = S0;
    bool a_dead = false, b_dead = false;
    for (int i = 0; i < steps; ++i) {
      const double z = nd(gen);
      if (!a_dead) {
        a += spec.mu(a) * dt + spec.sigma(a) * sq * z;
        if (absorb && a <= floor) { a = floor; a_dead = true; }
      }
      if (!b_dead) {
        b += spec.mu(b) * dt - spec.sigma(b) * sq * z;
        if (absorb && b <= floor) { b = floor; b_dead = true; }
      }
      if (!std::isfinite(a) || !std::isfinite(b)) return false;
    }
    pa = std::max(K - a, 0.0);
    pb = std::max(K - b, 0.0);
    return true;
  };
  return run_blocks(config, std::exp(-spec.rate * contract.maturity), simulate);
}

McResult mc_european_put(const JumpModel& model, const PutContract& contract,
                         const OracleConfig& config) {
  contract.validate();
  const double T = contract.maturity;
  const double K = contract.strike;
  const double x0 = std::log(contract.spot);
  // Log-price coefficients are constant, so one Euler step over [0, T] is exact.
  const double drift = model.log_diffusion.mu(x0) * T;
  const double vol = model.log_diffusion.sigma(x0) * std::sqrt(T);
  const double lamT = model.jumps.intensity * T;
  auto simulate = [&](std::mt19937_64& gen, double& pa, double& pb) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const double z = nd(gen);
    double jumps = 0.0;
    if (lamT > 0.0) {
      const int n = std::poisson_distribution<int>(lamT)(gen);
      for (int i = 0; i < n; ++i) jumps += model.jumps.sample(gen);
    }
    const double xa = x0 + drift + vol * z + jumps;
    const double xb = x0 + drift - vol * z + jumps;
    if (!std::isfinite(xa) || !std::isfinite(xb)) return false;
    pa = std::max(K - std::exp(xa), 0.0);
    pb = std::max(K - std::exp(xb), 0.0);
    return true;
  };
  return run_blocks(config, std::exp(-model.rate * T), simulate);
}

FdResult fd_american_put(const GbmParams& params, const PutContract& contract,
                         const OracleConfig& config) {
  params.validate();
  contract.validate();
  config.validate();
  const int M = config.fd_space_steps;
  const int steps = config.fd_time_steps;
  if (M < 50) throw ParameterError("finite difference: fewer than 50 space steps");
  const double K = contract.strike, T = contract.maturity;
  const double s = params.sigma;
  const double width = 5.0 * s * std::sqrt(T);
  const double xc = std::log(contract.spot);
  const double x_lo = xc - width, h = 2.0 * width / M;
  const double dt = T / steps;
  const double nu = params.r - params.delta - 0.5 * s * s;

  std::vector<double> x(M + 1), intr(M + 1), v(M + 1);
  for (int i = 0; i <= M; ++i) {
    x[i] = x_lo + i * h;
    intr[i] = std::max(K - std::exp(x[i]), 0.0);
    v[i] = intr[i];
  }
  // Operator L v_i = a v_{i-1} + b v_i + c v_{i+1}.
  const double a = 0.5 * s * s / (h * h) - 0.5 * nu / h;
  const double b = -s * s / (h * h) - params.r;
  const double c = 0.5 * s * s / (h * h) + 0.5 * nu / h;
  const int n = M - 1;
  std::vector<double> lo(n), di(n), up(n), rhs(n), cp(n), dp(n);
  for (int k = 0; k < steps; ++k) {
    for (int i = 1; i < M; ++i) {
      const int j = i - 1;
      rhs[j] = v[i] + 0.5 * dt * (a * v[i - 1] + b * v[i] + c * v[i + 1]);
      lo[j] = -0.5 * dt * a;
      di[j] = 1.0 - 0.5 * dt * b;
      up[j] = -0.5 * dt * c;
    }
    const double left = intr[0];
    const double right = 0.0;
    rhs[0] -= lo[0] * left;
    rhs[n - 1] -= up[n - 1] * right;
    cp[0] = up[0] / di[0];
    dp[0] = rhs[0] / di[0];
    for (int j = 1; j < n; ++j) {
      const double m = di[j] - lo[j] * cp[j - 1];
      cp[j] = up[j] / m;
      dp[j] = (rhs[j] - lo[j] * dp[j - 1]) / m;
    }
    v[M - 1] = dp[n - 1];
    for (int j = n - 2; j >= 0; --j) v[j + 1] = dp[j] - cp[j] * v[j + 2];
    v[0] = left;
    v[M] = right;
    for (int i = 0; i <= M; ++i) v[i] = std::max(v[i], intr[i]);
  }
  FdResult res;
  res.price = interp_linear(x, v, xc);
  for (int i = M; i >= 0; --i) {
    if (intr[i] > 0.0 && v[i] <= intr[i] + 1e-12 * K) {
      res.boundary = std::exp(x[i]);
      break;
    }
  }
  return res;
}

}  // namespace eep
