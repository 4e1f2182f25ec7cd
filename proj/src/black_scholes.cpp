#include "chawkes/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chawkes/errors.hpp"
#include "chawkes/normal.hpp"

namespace chawkes {

double bs_price(double S, double K, double r, double sigma, double tau, bool is_call) {
  if (!(S > 0.0) || !(K > 0.0) || !(tau > 0.0) || !(sigma >= 0.0))
    throw ValidationError("bs_price: need S, K, tau > 0 and sigma >= 0");
  const double df = std::exp(-r * tau);
  if (sigma == 0.0) return is_call ? std::max(S - K * df, 0.0) : std::max(K * df - S, 0.0);
  const double sd = sigma * std::sqrt(tau);
  const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * tau) / sd;
  const double d2 = d1 - sd;
  if (is_call) return S * normal_cdf(d1) - K * df * normal_cdf(d2);
  return K * df * normal_cdf(-d2) - S * normal_cdf(-d1);
}

double bs_vega(double S, double K, double r, double sigma, double tau) {
  const double sd = sigma * std::sqrt(tau);
  const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * tau) / sd;
  return S * normal_pdf(d1) * std::sqrt(tau);
}

double implied_vol(double price, double S, double K, double r, double tau, bool is_call) {
  if (!(S > 0.0) || !(K > 0.0) || !(tau > 0.0)) throw ValidationError("implied_vol: need S, K, tau > 0");
  const double df = std::exp(-r * tau);
  const double lower = is_call ? std::max(S - K * df, 0.0) : std::max(K * df - S, 0.0);
  const double upper = is_call ? S : K * df;
  if (!(price > lower)) {
    std::ostringstream msg;
    msg << "implied_vol: price " << price << " below band (intrinsic " << lower << ")";
    throw ValidationError(msg.str());
  }
  if (!(price < upper)) {
    std::ostringstream msg;
    msg << "implied_vol: price " << price << " above band (" << upper << ")";
    throw ValidationError(msg.str());
  }

  const double tol = 1e-10 * S;
  double lo = kIvLower, hi = kIvUpper;
  const double f_lo = bs_price(S, K, r, lo, tau, is_call) - price;
  const double f_hi = bs_price(S, K, r, hi, tau, is_call) - price;
  if (f_lo > 0.0) throw ValidationError("implied_vol: price below band for sigma >= 1e-4");
  if (f_hi < 0.0) throw ValidationError("implied_vol: price above band for sigma <= 5");

  double sigma = std::clamp(std::sqrt(2.0 * std::abs(std::log(S / K) + r * tau) / tau), 0.05, 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = bs_price(S, K, r, sigma, tau, is_call) - price;
    const double vega = bs_vega(S, K, r, sigma, tau);
    // Price tolerance plus a small predicted step, so sigma itself is resolved.
    if (std::abs(f) < tol && (vega <= 0.0 || std::abs(f) < 1e-12 * vega)) return sigma;
    if (f > 0.0) hi = sigma;
    else lo = sigma;
    double next = vega > 0.0 ? sigma - f / vega : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15) return next;
    sigma = next;
  }
  if (std::abs(bs_price(S, K, r, sigma, tau, is_call) - price) < tol) return sigma;
  throw NumericalError("implied_vol: no convergence after 200 iterations");
}

}  // namespace chawkes
