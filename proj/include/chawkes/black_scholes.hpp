#pragma once

namespace chawkes {

double bs_price(double S, double K, double r, double sigma, double tau, bool is_call);
double bs_vega(double S, double K, double r, double sigma, double tau);

inline constexpr double kIvLower = 1e-4;
inline constexpr double kIvUpper = 5.0;

/// Bracketed Newton with bisection fallback on [kIvLower, kIvUpper].
/// Throws ValidationError ("below band" / "above band") for prices outside the
/// no-arbitrage band and NumericalError after 200 iterations.
double implied_vol(double price, double S, double K, double r, double tau, bool is_call);

}  // namespace chawkes
