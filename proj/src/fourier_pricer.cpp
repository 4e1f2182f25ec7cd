#include "chawkes/fourier_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chawkes/errors.hpp"
#include "chawkes/parallel.hpp"

namespace chawkes {

MaturitySlice::MaturitySlice(const RiskNeutralModel& model, double T, const QuadRule& rule, int n_steps,
                             OdeScheme scheme)
    : rule_(rule), T_(T), tau_(T - model.t0), S0_(model.S0) {
  if (!(tau_ > 0.0)) throw ValidationError("maturity must exceed t0");
  if (!(model.sigma > 0.0))
    throw ValidationError("quadrature pricing needs sigma > 0; use Monte Carlo or the series pricer for pure jumps");
  model.check();
  discount_ = std::exp(-model.r * tau_);

  const CompanionSystem sys(model.hawkes);
  const double mu = model.hawkes.mu;
  const double k = exp_moment(model.jump_Q) - 1.0;
  const CVec zero(sys.dim(), cplx{});
  coeff_.assign(rule.m, cplx{});
  parallel_for(static_cast<std::size_t>(rule.m), [&](std::size_t j) {
    const double u = rule.nodes[j];
    const cplx iu(0.0, u);
    OdeCoeffs c = solve_affine_ode(sys, mu, jump_cf(model.jump_Q, u), -iu * (model.r - mu * k), iu * k, zero, tau_,
                                   n_steps, scheme);
    c.u = u;
    coeff_[j] = std::exp(log_cf_from_coeffs(c, model) + rule.log_scaled[j]) / iu;
  });
}

double MaturitySlice::cdf(double x) const {
  double acc = 0.0;
  for (int k = 0; k < rule_.m; ++k) {
    const cplx c = coeff_[k];
    if (c == cplx{}) continue;
    const double ux = rule_.nodes[k] * x;
    acc += std::cos(ux) * c.real() + std::sin(ux) * c.imag();
  }
  return std::clamp(0.5 - acc / std::numbers::pi, 0.0, 1.0);
}

double MaturitySlice::put(double K) const {
  if (!(K > 0.0)) throw ValidationError("strike must be > 0");
  const double log_k = std::log(K);
  double acc = 0.0;
  for (int j = 0; j < rule_.m; ++j) {
    const double w = rule_.weights[j];
    if (w == 0.0) continue;
    acc += cdf(log_k - rule_.nodes[j]) * w;
  }
  return discount_ * K * acc;
}

double MaturitySlice::call(double K) const { return put(K) + S0_ - K * discount_; }

double cdf_logprice(double x, const RiskNeutralModel& model, double T, const QuadRule& rule, int n_steps) {
  return MaturitySlice(model, T, rule, n_steps).cdf(x);
}

double put_price(const PricingRequest& req) {
  return MaturitySlice(req.model, req.T, req.rule, req.n_steps, req.scheme).put(req.K);
}

double call_price(const PricingRequest& req) {
  return MaturitySlice(req.model, req.T, req.rule, req.n_steps, req.scheme).call(req.K);
}

PriceSurface price_surface(const RVec& strikes, const RVec& maturities, const RiskNeutralModel& model,
                           const QuadRule& rule, int n_steps, OdeScheme scheme) {
  for (double K : strikes)
    if (!(K > 0.0)) throw ValidationError("strikes must be > 0");
  PriceSurface s{strikes, maturities, {}, {}};
  for (double T : maturities) {
    const MaturitySlice slice(model, T, rule, n_steps, scheme);
    RVec puts(strikes.size());
    parallel_for(strikes.size(), [&](std::size_t i) { puts[i] = slice.put(strikes[i]); });
    RVec calls(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) calls[i] = puts[i] + slice.S0() - strikes[i] * slice.discount();
    s.calls.push_back(std::move(calls));
    s.puts.push_back(std::move(puts));
  }
  return s;
}

}  // namespace chawkes
