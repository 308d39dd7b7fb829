#pragma once

#include <memory>
#include <vector>

#include "eep/contract.hpp"
#include "eep/hermite.hpp"

namespace eep {

double terminal_boundary(const DiffusionSpec& spec, double K);

// Transition law seen from one source state: European leg and premium integrand.
class SourceLaw {
 public:
  virtual ~SourceLaw() = default;
  virtual double european(double tau, long* clamps) const = 0;
  // Premium integrand for a strictly positive gap; `to` is the time index of B_to.
  virtual double eps(double gap, double B_to, int to, long* clamps) const = 0;
};

class TransitionLaw {
 public:
  virtual ~TransitionLaw() = default;
  virtual std::unique_ptr<SourceLaw> from(double S, double max_gap) const = 0;
  // Exercise-region payout rate at time index `at`.
  virtual double flow(double S, int at) const = 0;
  virtual double rate() const = 0;
  // Called once a boundary value is final within a solve, terminal value first.
  virtual void boundary_fixed(int, double) const {}
};

// Premium integrand with the point-mass convention at zero gap.
double eps_term(const TransitionLaw& law, const SourceLaw& src, double S_from, double gap,
                double B_to, int to, long* clamps);

// Trapezoid sum  sum_{q=l}^{N} w_q eps((q-l) dt, S_from, B_q)  with fixed summation order.
double eps_sum_serial(const TransitionLaw& law, const SourceLaw& src, double S_from, int l,
                      const BoundaryGrid& grid, long* clamps);
double eps_sum_parallel(const TransitionLaw& law, const SourceLaw& src, double S_from, int l,
                        const BoundaryGrid& grid, long* clamps);

class ExpansionLaw : public TransitionLaw {
 public:
  ExpansionLaw(const DensityExpansion& expansion, const PutContract& contract,
               const SolverConfig& config = {});
  std::unique_ptr<SourceLaw> from(double S, double max_gap) const override;
  double flow(double S, int at) const override;
  double rate() const override { return rate_; }

 private:
  const DensityExpansion& expansion_;
  PutContract contract_;
  SolverConfig config_;
  double rate_;
  double y_strike_;
  double y_floor_;
};

class GbmExactLaw : public TransitionLaw {
 public:
  GbmExactLaw(const GbmParams& params, const PutContract& contract);
  std::unique_ptr<SourceLaw> from(double S, double max_gap) const override;
  double flow(double, int) const override { return params_.r * contract_.strike; }
  double rate() const override { return params_.r; }

 private:
  GbmParams params_;
  PutContract contract_;
};

BoundaryGrid solve_boundary(const TransitionLaw& law, const PutContract& contract, int N,
                            double terminal, const SolverConfig& config, Diagnostics* diag);
PricingResult price(const TransitionLaw& law, const PutContract& contract, int N, double terminal,
                    const SolverConfig& config = {});

double european_put(const DensityExpansion& expansion, const PutContract& contract, double t,
                    double S_t, const SolverConfig& config = {});
double eep_integrand_eps(const DensityExpansion& expansion, const PutContract& contract,
                         double s_gap, double B_from, double B_to, const SolverConfig& config = {});
BoundaryGrid solve_boundary(const DensityExpansion& expansion, const PutContract& contract, int N,
                            const SolverConfig& config = {});
PricingResult price(const DensityExpansion& expansion, const PutContract& contract, int N,
                    const SolverConfig& config = {});

PricingResult gbm_closed_form_price(const GbmParams& params, const PutContract& contract, int N,
                                    const SolverConfig& config = {});

// Convenience: GBM/CEV/NMR expansion anchored at the strike.
DensityExpansion make_expansion(const DiffusionSpec& spec, double strike, int order,
                                ExpansionConfig config = {});

}  // namespace eep
