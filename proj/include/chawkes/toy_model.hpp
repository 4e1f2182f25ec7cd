#pragma once

// Joint transform of (X_T, N_T), counting probabilities by discrete Fourier
// inversion, and the series pricer for mean-one jumps.

#include "chawkes/charfn_engine.hpp"

namespace chawkes {

/// E[exp(i u^T X_T + i kappa (N_T - N_t0)) | F_t0].
cplx joint_cf_XN(const RVec& u, double kappa, const CarmaHawkesParams& params, double t0, double T,
                 const StateVector& X_t0, int n_steps, OdeScheme scheme = OdeScheme::Euler);

/// E[z^(N_T - N_t0) | F_t0] for complex z (the generating function).
cplx counting_pgf(cplx z, const CarmaHawkesParams& params, double t0, double T, const StateVector& X_t0,
                  int n_steps, OdeScheme scheme = OdeScheme::Euler);

struct CountingPmf {
  RVec probs;  // n = 0..n_max
  int n_max = 0;
  double mass_deficit = 0.0;
};

/// Smallest power of two >= max(256, 4 n_max).
int default_grid_size(int n_max);

/// Trapezoid rule on [0, 2 pi) over grid_size points (0 selects the default).
/// Throws NumericalError when the mass beyond n_max exceeds epsilon.
CountingPmf counting_pmf(const CarmaHawkesParams& params, double t0, double T, const StateVector& X_t0, int n_max,
                         int grid_size = 0, int n_steps = 2000, double epsilon = 1e-8,
                         OdeScheme scheme = OdeScheme::Euler);

/// Doubles n_max from 64 until the deficit is below epsilon.
CountingPmf counting_pmf_adaptive(const CarmaHawkesParams& params, double t0, double T, const StateVector& X_t0,
                                  double epsilon = 1e-8, int n_steps = 2000, OdeScheme scheme = OdeScheme::Euler);

struct SeriesPrice {
  double price = 0.0;
  double error_bound = 0.0;  // S0 times the neglected probability mass
  int terms = 0;
};

/// Pure-jump series with E[e^J] = 1; F and the tilted F from jump_models.
SeriesPrice toy_call_price(double K, double tau, double S0, double r, const JumpSpec& spec_Q, const CountingPmf& pmf,
                           double epsilon = 1e-8);
/// Each term is a Black-Scholes call at sigma(n) = sqrt(sigma^2 + n sigma_J^2 / tau); normal jumps.
SeriesPrice toy_call_price_with_diffusion(double K, double tau, double S0, double r, double sigma,
                                          const JumpSpec& spec_Q, const CountingPmf& pmf, double epsilon = 1e-8);

SeriesPrice toy_call_price(double K, double t0, double T, double S0, double r, const CarmaHawkesParams& params,
                           const JumpSpec& spec_Q, double epsilon = 1e-8, int n_steps = 2000);
SeriesPrice toy_call_price_with_diffusion(double K, double t0, double T, double S0, double r, double sigma,
                                          const CarmaHawkesParams& params, const JumpSpec& spec_Q,
                                          double epsilon = 1e-8, int n_steps = 2000);

}  // namespace chawkes
