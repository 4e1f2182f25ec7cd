#pragma once

// Gil-Pelaez CDF of ln S_T by Gauss-Laguerre quadrature and the nested
// quadrature put price; calls by put-call parity.

#include "chawkes/charfn_engine.hpp"
#include "chawkes/laguerre_quadrature.hpp"

namespace chawkes {

struct PricingRequest {
  double K;
  double T;
  const RiskNeutralModel& model;
  const QuadRule& rule;
  int n_steps = 2000;
  OdeScheme scheme = OdeScheme::Euler;
};

/// Characteristic-function values for one maturity, computed once and shared
/// by every strike and every outer node.
class MaturitySlice {
 public:
  /// Throws ValidationError for sigma = 0 or T <= t0.
  MaturitySlice(const RiskNeutralModel& model, double T, const QuadRule& rule, int n_steps,
                OdeScheme scheme = OdeScheme::Euler);
  /// The rule is held by reference and must outlive the slice.
  MaturitySlice(const RiskNeutralModel&, double, QuadRule&&, int, OdeScheme = OdeScheme::Euler) = delete;

  double T() const { return T_; }
  double tau() const { return tau_; }
  double discount() const { return discount_; }
  double S0() const { return S0_; }

  /// F(x) = P(ln S_T <= x), clamped to [0, 1].
  double cdf(double x) const;
  double put(double K) const;
  double call(double K) const;

 private:
  const QuadRule& rule_;
  double T_, tau_, discount_, S0_;
  CVec coeff_;  // phi(u_k) / (i u_k) * e^{u_k} w_k
};

double cdf_logprice(double x, const RiskNeutralModel& model, double T, const QuadRule& rule, int n_steps = 2000);
double put_price(const PricingRequest& req);
double call_price(const PricingRequest& req);

struct PriceSurface {
  RVec strikes;
  RVec maturities;
  std::vector<RVec> calls;  // [maturity][strike]
  std::vector<RVec> puts;
};

PriceSurface price_surface(const RVec& strikes, const RVec& maturities, const RiskNeutralModel& model,
                           const QuadRule& rule, int n_steps = 2000, OdeScheme scheme = OdeScheme::Euler);

}  // namespace chawkes
