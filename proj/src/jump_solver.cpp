#include "eep/jump_solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace eep {

namespace {

constexpr double kGaussReach = 11.0;
constexpr double kMaxPanel = 0.5;

double trapezoid_weight(int q, int l, int N) { return (q == l || q == N) ? 0.5 : 1.0; }

// Interval where a source kernel has mass: the Gaussian core and two compounded jumps.
Interval kernel_reach(const JumpDensityExpansion& e, double x0, double gap) {
  const double g = kGaussReach * e.model().log_diffusion.sigma(x0) * std::sqrt(gap);
  const Interval sup = e.model().jumps.support;
  if (e.intensity() == 0.0) return {x0 - g, x0 + g};
  return {x0 + std::min(2.0 * sup.lo, -g), x0 + std::max(2.0 * sup.hi, g)};
}

std::vector<double> panel_edges(const JumpDensityExpansion& e, double x0, double gap, double a,
                                double b) {
  const double g = kGaussReach * e.model().log_diffusion.sigma(x0) * std::sqrt(gap);
  std::vector<double> cand{a, b, x0 - g, x0, x0 + g};
  if (e.intensity() > 0.0) {
    const Interval sup = e.model().jumps.support;
    for (double v : {sup.lo, sup.hi, 2.0 * sup.lo, 2.0 * sup.hi}) cand.push_back(x0 + v);
    for (double bp : e.model().jumps.breakpoints) cand.push_back(x0 + bp);
  }
  std::vector<double> edges;
  for (double v : cand) {
    if (v >= a && v <= b) edges.push_back(v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((edges[i + 1] - edges[i]) / kMaxPanel)));
    for (int p = 0; p < pieces; ++p) out.push_back(edges[i] + (edges[i + 1] - edges[i]) * p / pieces);
  }
  if (!edges.empty()) out.push_back(edges.back());
  return out;
}

template <class F>
double integrate_kernel(const JumpDensityExpansion& e, const JumpSourceKernel& k, double gap,
                        double a, double b, int nodes, F f, long* clamps) {
  const Interval reach = kernel_reach(e, k.x0(), gap);
  a = std::max(a, reach.lo);
  b = std::min(b, reach.hi);
  if (!(b > a)) return 0.0;
  const std::vector<double> edges = panel_edges(e, k.x0(), gap, a, b);
  const GaussLegendre& gl = gauss_legendre(nodes);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    if (!(half > 0.0)) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double x = mid + half * gl.x[i];
      const double d = k.density(x, gap, clamps);
      if (d != 0.0) acc += gl.w[i] * d * f(x);
    }
    total += half * acc;
  }
  return total;
}

// Jump-size panels over [a, b] split at kinks of the jump density.
std::vector<double> jump_edges(const JumpDensityExpansion& e, double a, double b) {
  std::vector<double> edges{a, b};
  for (double bp : e.model().jumps.breakpoints) {
    if (bp > a && bp < b) edges.push_back(bp);
  }
  std::sort(edges.begin(), edges.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((edges[i + 1] - edges[i]) / kMaxPanel)));
    for (int p = 0; p < pieces; ++p) out.push_back(edges[i] + (edges[i + 1] - edges[i]) * p / pieces);
  }
  out.push_back(edges.back());
  return out;
}

double european_single_step(const JumpDensityExpansion& e, const PutContract& c, double S,
                            double tau, int nodes) {
  const double x0 = std::log(S);
  const JumpSourceKernel k = e.kernel(x0, tau);
  const double K = c.strike;
  const double v = integrate_kernel(e, k, tau, -std::numeric_limits<double>::infinity(), std::log(K), nodes,
                                    [K](double x) { return K - std::exp(x); }, nullptr);
  return std::exp(-e.model().rate * tau) * v;
}

struct ExcessTable {
  double x_lo = 0.0;
  double h = 0.0;
  std::vector<double> v;
  double operator()(double x) const {
    if (v.empty()) return 0.0;
    const double t = (x - x_lo) / h;
    if (t < 0.0 || t > static_cast<double>(v.size() - 1)) return 0.0;
    const std::size_t i = std::min(static_cast<std::size_t>(t), v.size() - 2);
    const double f = t - static_cast<double>(i);
    return v[i] * (1.0 - f) + v[i + 1] * f;
  }
};

class JumpLaw;

class JumpSource : public SourceLaw {
 public:
  JumpSource(const JumpLaw& law, double S, double max_gap);
  double european(double tau, long* clamps) const override;
  double eps(double gap, double B_to, int to, long* clamps) const override;
  double eps_part(double gap, double B_to, long* clamps) const;
  double eta_part(double gap, int to, long* clamps) const;

 private:
  const JumpLaw& law_;
  double S_;
  JumpSourceKernel kernel_;
};

class JumpLaw : public TransitionLaw {
 public:
  JumpLaw(const JumpDensityExpansion& e, const PutContract& c, const EuropeanLattice& lattice,
          const ValueGrid* previous, const JumpSolverConfig& config, int N)
      : e_(e), c_(c), lattice_(lattice), prev_(previous), config_(config), N_(N),
        dt_(c.maturity / N), tables_(N + 1), bounds_(N + 1, c.strike) {}

  std::unique_ptr<SourceLaw> from(double S, double max_gap) const override {
    return std::make_unique<JumpSource>(*this, S, max_gap);
  }
  std::unique_ptr<JumpSource> source(double S, double max_gap) const {
    return std::make_unique<JumpSource>(*this, S, max_gap);
  }

  double flow(double S, int at) const override {
    return e_.model().rate * c_.strike - e_.model().dividend * S - rebalance_flow(S, at);
  }
  double rebalance_flow(double S, int at) const {
    if (!active()) return 0.0;
    return e_.intensity() * post_jump_excess(e_, c_, *prev_, at, std::log(S), S);
  }
  double rate() const override { return e_.model().rate; }

  void boundary_fixed(int n, double B) const override {
    bounds_[n] = B;
    if (!active()) return;
    ExcessTable& t = tables_[n];
    const int m = config_.excess_points;
    const double hi = std::log(B);
    const double lo = hi - e_.model().jumps.support.hi;
    t.x_lo = lo;
    t.h = (hi - lo) / (m - 1);
    t.v.assign(m, 0.0);
#pragma omp parallel for schedule(static) if (config_.base.parallel)
    for (int i = 0; i < m; ++i) t.v[i] = post_jump_excess(e_, c_, *prev_, n, lo + i * t.h, B);
  }

  bool active() const { return prev_ != nullptr && e_.intensity() > 0.0; }

  const JumpDensityExpansion& e_;
  PutContract c_;
  const EuropeanLattice& lattice_;
  const ValueGrid* prev_;
  JumpSolverConfig config_;
  int N_;
  double dt_;
  mutable std::vector<ExcessTable> tables_;
  mutable std::vector<double> bounds_;
};

JumpSource::JumpSource(const JumpLaw& law, double S, double max_gap)
    : law_(law), S_(S), kernel_(law.e_.kernel(std::log(S), std::max(max_gap, law.dt_))) {}

double JumpSource::european(double tau, long*) const {
  const int l = law_.N_ - static_cast<int>(std::lround(tau / law_.dt_));
  return law_.lattice_.value(l, S_);
}

double JumpSource::eps_part(double gap, double B_to, long* clamps) const {
  const JumpLaw& L = law_;
  const double K = L.c_.strike, r = L.e_.model().rate, d = L.e_.model().dividend;
  const double a = std::log(L.config_.base.lower_eps_rel * K);
  const double v = integrate_kernel(L.e_, kernel_, gap, a, std::log(B_to), L.config_.base.quad_nodes,
                                    [&](double x) { return r * K - d * std::exp(x); }, clamps);
  return std::exp(-r * gap) * v;
}

double JumpSource::eta_part(double gap, int to, long* clamps) const {
  const JumpLaw& L = law_;
  if (!L.active()) return 0.0;
  const ExcessTable& t = L.tables_[to];
  if (t.v.empty()) throw EvaluationError("rebalancing term requested before its boundary value", to);
  const double a = t.x_lo, b = t.x_lo + t.h * (t.v.size() - 1);
  const double v = integrate_kernel(L.e_, kernel_, gap, a, b, L.config_.base.quad_nodes,
                                    [&](double x) { return t(x); }, clamps);
  return std::exp(-L.e_.model().rate * gap) * L.e_.intensity() * v;
}

double JumpSource::eps(double gap, double B_to, int to, long* clamps) const {
  return eps_part(gap, B_to, clamps) - eta_part(gap, to, clamps);
}

ValueGrid build_value_grid(const JumpLaw& law, const BoundaryGrid& B, const JumpSolverConfig& cfg) {
  const JumpDensityExpansion& e = law.e_;
  const PutContract& c = law.c_;
  const double K = c.strike;
  const int N = B.n_steps;
  const int M = cfg.value_knots;
  if (M < 2) throw ParameterError("value grid: at least two space knots required");
  ValueGrid g;
  g.time_knots.resize(N + 1);
  for (int n = 0; n <= N; ++n) g.time_knots[n] = n * B.dt;
  const double top = e.intensity() > 0.0 ? std::exp(e.model().jumps.support.hi) : std::exp(1.0);
  const double s_lo = cfg.value_floor_rel * K, s_hi = 1.05 * K * std::max(top, 1.0);
  g.space_knots.resize(M);
  for (int i = 0; i < M; ++i) g.space_knots[i] = s_lo * std::pow(s_hi / s_lo, static_cast<double>(i) / (M - 1));
  g.values.assign(static_cast<std::size_t>(N + 1) * M, 0.0);

  std::vector<std::pair<int, int>> work;
  for (int n = 0; n <= N; ++n) {
    for (int i = 0; i < M; ++i) {
      const double S = g.space_knots[i];
      const double intr = std::max(K - S, 0.0);
      g.values[static_cast<std::size_t>(n) * M + i] = intr;
      if (n < N && S > B.values[n]) work.emplace_back(n, i);
    }
  }
  const double dt = B.dt;
#pragma omp parallel for schedule(dynamic) if (cfg.base.parallel)
  for (std::size_t w = 0; w < work.size(); ++w) {
    const int n = work[w].first, i = work[w].second;
    const double S = g.space_knots[i];
    auto src = law.source(S, (N - n) * dt);
    double sum = 0.0;
    for (int q = n + 1; q <= N; ++q) {
      sum += trapezoid_weight(q, n, N) * src->eps((q - n) * dt, B.values[q], q, nullptr);
    }
    const double P = law.lattice_.value(n, S) + dt * sum;
    double& slot = g.values[static_cast<std::size_t>(n) * M + i];
    slot = std::max(P, slot);
  }
  return g;
}

}  // namespace

double ValueGrid::row_value(int n, double S) const {
  if (S > space_knots.back() * (1.0 + 1e-12)) throw RangeError("value grid: state above grid range");
  const std::size_t M = space_knots.size();
  const double* row = values.data() + static_cast<std::size_t>(n) * M;
  if (S <= space_knots.front()) return row[0];
  const double lx = std::log(S);
  const double l0 = std::log(space_knots.front()), l1 = std::log(space_knots.back());
  const double t = (lx - l0) / (l1 - l0) * (M - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(t), M - 2);
  const double f = std::clamp(t - static_cast<double>(i), 0.0, 1.0);
  return row[i] * (1.0 - f) + row[i + 1] * f;
}

double ValueGrid::value(double t, double S) const {
  const int N = static_cast<int>(time_knots.size()) - 1;
  if (N <= 0) return row_value(0, S);
  const double dt = time_knots[1] - time_knots[0];
  const double u = std::clamp(t / dt, 0.0, static_cast<double>(N));
  const int n = std::min(static_cast<int>(u), N - 1);
  const double f = u - n;
  return row_value(n, S) * (1.0 - f) + row_value(n + 1, S) * f;
}

EuropeanLattice::EuropeanLattice(const JumpDensityExpansion& expansion, const PutContract& contract,
                                 int N, double step, bool parallel)
    : expansion_(expansion), contract_(contract), N_(N), dt_(contract.maturity / N), h_(step) {
  contract_.validate();
  if (N < 1) throw ParameterError("european lattice: N must be positive");
  if (!(step > 0.0)) throw ParameterError("european lattice: step must be positive");
  const Interval sup = expansion.model().jumps.support;
  const double K = contract_.strike;
  const double lo = std::log(K) - 3.0 - std::max(0.0, -sup.lo);
  const double hi = std::log(K) + 3.0 + std::max(0.0, sup.hi);
  const int n = static_cast<int>(std::ceil((hi - lo) / h_)) + 1;
  x0_ = lo;
  const double disc = std::exp(-expansion.model().rate * dt_);
  const int nodes = 64;

  layers_.assign(N_, std::vector<double>(n, 0.0));
  std::vector<double>& last = layers_[N_ - 1];
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) last[i] = european_single_step(expansion, contract_, std::exp(x0_ + i * h_), dt_, nodes);
  if (N_ == 1) return;

  // One-step kernel rows with trapezoid weights.
  std::vector<double> kmat(static_cast<std::size_t>(n) * n, 0.0);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double xi = x0_ + i * h_;
    const JumpSourceKernel k = expansion.kernel(xi, dt_);
    const Interval reach = kernel_reach(expansion, xi, dt_);
    double* row = kmat.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double xj = x0_ + j * h_;
      if (xj < reach.lo || xj > reach.hi) continue;
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      row[j] = disc * h_ * w * k.density(xj, dt_);
    }
  }
  for (int l = N_ - 2; l >= 0; --l) {
    const std::vector<double>& next = layers_[l + 1];
    std::vector<double>& cur = layers_[l];
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n; ++i) {
      const double* row = kmat.data() + static_cast<std::size_t>(i) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += row[j] * next[j];
      cur[i] = acc;
    }
  }
}

double EuropeanLattice::value(int l, double S) const {
  if (l < 0 || l > N_) throw RangeError("european lattice: time index out of range");
  const double K = contract_.strike;
  if (l == N_) return std::max(K - S, 0.0);
  const std::vector<double>& v = layers_[l];
  const double x = std::log(S);
  const double lo = x0_ + 2.0 * h_, hi = x0_ + (v.size() - 3) * h_;
  if (x >= lo && x <= hi) return interp_cubic_uniform(x0_, h_, v, x);
  return european_single_step(expansion_, contract_, S, (N_ - l) * dt_, 64);
}

double post_jump_excess(const JumpDensityExpansion& expansion, const PutContract& contract,
                        const ValueGrid& grid, int n, double x, double B) {
  const Interval sup = expansion.model().jumps.support;
  const double a = std::max(std::log(B) - x, sup.lo);
  const double b = sup.hi;
  if (!(b > a)) return 0.0;
  const double K = contract.strike;
  const std::vector<double> edges = jump_edges(expansion, a, b);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    total += integrate(
        [&](double z) {
          const double S = std::exp(x + z);
          return (grid.row_value(n, S) - (K - S)) * expansion.jump_pdf(z);
        },
        edges[p], edges[p + 1], {32, 1});
  }
  return total;
}

double rebalancing_eta(const JumpDensityExpansion& expansion, const PutContract& contract,
                       const ValueGrid& value_grid, double s_gap, double B_from,
                       const BoundaryGrid& boundary, int to_index) {
  if (to_index < 0 || to_index > boundary.n_steps) throw RangeError("rebalancing_eta: time index out of range");
  if (s_gap < 0.0) throw ParameterError("rebalancing_eta: negative gap");
  const double rho = expansion.intensity();
  if (rho == 0.0) return 0.0;
  const double B = boundary.values[to_index];
  if (s_gap == 0.0) {
    const double w = B_from < B ? 1.0 : (B_from == B ? 0.5 : 0.0);
    if (w == 0.0) return 0.0;
    return w * rho * post_jump_excess(expansion, contract, value_grid, to_index, std::log(B_from), B);
  }
  const JumpSourceKernel k = expansion.kernel(std::log(B_from), s_gap);
  const double hi = std::log(B);
  const double lo = hi - expansion.model().jumps.support.hi;
  const double v = integrate_kernel(expansion, k, s_gap, lo, hi, 64,
                                    [&](double x) {
                                      return post_jump_excess(expansion, contract, value_grid, to_index, x, B);
                                    },
                                    nullptr);
  return std::exp(-expansion.model().rate * s_gap) * rho * v;
}

namespace {

double jump_terminal_boundary(const JumpModel& m, double K) {
  if (m.dividend <= 0.0) return K;
  return std::min(K, m.rate * K / m.dividend);
}

struct FixedPointOutcome {
  BoundaryGrid boundary;
  ValueGrid grid;
  std::unique_ptr<ValueGrid> used;  // value grid feeding the final pass
  int iters = 0;
  std::vector<double> deltas;
  Diagnostics diag;
};

FixedPointOutcome run_fixed_point(const JumpDensityExpansion& e, const PutContract& c, int N,
                                  const JumpSolverConfig& cfg, const EuropeanLattice& lattice) {
  if (N < 2) throw ParameterError("jump solver: N must be at least 2");
  FixedPointOutcome out;
  const double K = c.strike;
  const double terminal = jump_terminal_boundary(e.model(), K);
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    JumpLaw law(e, c, lattice, out.used.get(), cfg, N);
    BoundaryGrid B = solve_boundary(law, c, N, terminal, cfg.base, &out.diag);
    ValueGrid g = build_value_grid(law, B, cfg);
    out.iters = pass + 1;
    if (e.intensity() == 0.0) {
      out.boundary = std::move(B);
      out.grid = std::move(g);
      return out;
    }
    if (pass > 0) {
      double delta = 0.0;
      for (int n = 0; n <= N; ++n) delta = std::max(delta, std::abs(B.values[n] - out.boundary.values[n]));
      out.deltas.push_back(delta);
      if (delta <= cfg.fixed_point_tol_rel * K) {
        out.boundary = std::move(B);
        out.grid = std::move(g);
        return out;
      }
    }
    out.boundary = std::move(B);
    out.grid = g;
    out.used = std::make_unique<ValueGrid>(std::move(g));
  }
  throw ConvergenceError("jump solver: fixed point did not converge",
                         out.deltas.empty() ? 0.0 : out.deltas.back());
}

}  // namespace

std::pair<BoundaryGrid, ValueGrid> solve_boundary_jump(const JumpDensityExpansion& expansion,
                                                       const PutContract& contract, int N,
                                                       const JumpSolverConfig& config) {
  contract.validate();
  EuropeanLattice lattice(expansion, contract, N, config.lattice_step, config.base.parallel);
  FixedPointOutcome fp = run_fixed_point(expansion, contract, N, config, lattice);
  return {std::move(fp.boundary), std::move(fp.grid)};
}

JumpPricingResult price_jump(const JumpDensityExpansion& expansion, const PutContract& contract,
                             int N, const JumpSolverConfig& config) {
  contract.validate();
  EuropeanLattice lattice(expansion, contract, N, config.lattice_step, config.base.parallel);
  FixedPointOutcome fp = run_fixed_point(expansion, contract, N, config, lattice);

  JumpPricingResult res;
  res.boundary = fp.boundary;
  res.fixed_point_iters = fp.iters;
  res.boundary_deltas = fp.deltas;
  res.diagnostics = fp.diag;

  // Rebuild the final pass's rebalancing tables on the converged boundary.
  JumpLaw law(expansion, contract, lattice, fp.used.get(), config, N);
  for (int n = N; n >= 0; --n) law.boundary_fixed(n, res.boundary.values[n]);

  const double S0 = contract.spot, K = contract.strike;
  const double dt = res.boundary.dt;
  res.european = lattice.value(0, S0);
  if (S0 <= res.boundary.values[0]) {
    res.price = K - S0;
    res.premium = res.price - res.european;
    res.rebalance = 0.0;
  } else {
    auto src = law.source(S0, contract.maturity);
    std::vector<double> e_terms(N + 1, 0.0), g_terms(N + 1, 0.0);
    std::vector<long> clamps(N + 1, 0);
#pragma omp parallel for schedule(dynamic) if (config.base.parallel)
    for (int q = 1; q <= N; ++q) {
      e_terms[q] = src->eps_part(q * dt, res.boundary.values[q], &clamps[q]);
      g_terms[q] = src->eta_part(q * dt, q, &clamps[q]);
    }
    double e_sum = 0.0, g_sum = 0.0;
    for (int q = 1; q <= N; ++q) {
      const double w = trapezoid_weight(q, 0, N);
      e_sum += w * e_terms[q];
      g_sum += w * g_terms[q];
      res.diagnostics.clamps += clamps[q];
    }
    res.premium = dt * e_sum;
    res.rebalance = dt * g_sum;
    res.price = res.european + res.premium - res.rebalance;
  }
  res.value_grid = std::move(fp.grid);
  return res;
}

JumpDensityExpansion make_jump_expansion(const JumpModel& model, double strike, int order,
                                         JumpExpansionConfig config) {
  return JumpDensityExpansion(model, std::log(strike), order, config);
}

}  // namespace eep
