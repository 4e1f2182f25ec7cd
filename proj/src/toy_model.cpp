#include "chawkes/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chawkes/black_scholes.hpp"
#include "chawkes/errors.hpp"
#include "chawkes/parallel.hpp"

namespace chawkes {

namespace {

cplx transform(const CompanionSystem& sys, double mu, cplx psi, const CVec& final_u, double t0, double T,
               const StateVector& X_t0, int n_steps, OdeScheme scheme) {
  if (!(T >= t0)) throw ValidationError("T must be >= t0");
  const OdeCoeffs c = solve_affine_ode(sys, mu, psi, 0.0, 0.0, final_u, T - t0, n_steps, scheme);
  cplx expo = c.u0;
  for (std::size_t i = 0; i < X_t0.size(); ++i) expo += c.u2[i] * X_t0[i];
  return std::exp(expo);
}

void check_state(const CarmaHawkesParams& params, const StateVector& X_t0) {
  if (!X_t0.empty() && X_t0.size() != params.p()) throw ValidationError("X_t0 length must equal p");
}

}  // namespace

cplx joint_cf_XN(const RVec& u, double kappa, const CarmaHawkesParams& params, double t0, double T,
                 const StateVector& X_t0, int n_steps, OdeScheme scheme) {
  check_state(params, X_t0);
  const CompanionSystem sys(params);
  if (u.size() != sys.dim()) throw ValidationError("joint_cf_XN: u length must equal p");
  CVec final_u(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) final_u[i] = cplx(0.0, u[i]);
  return transform(sys, params.mu, std::exp(cplx(0.0, kappa)), final_u, t0, T, X_t0, n_steps, scheme);
}

cplx counting_pgf(cplx z, const CarmaHawkesParams& params, double t0, double T, const StateVector& X_t0, int n_steps,
                  OdeScheme scheme) {
  check_state(params, X_t0);
  const CompanionSystem sys(params);
  return transform(sys, params.mu, z, CVec(sys.dim(), cplx{}), t0, T, X_t0, n_steps, scheme);
}

int default_grid_size(int n_max) {
  int g = 256;
  while (g < 4 * n_max) g *= 2;
  return g;
}

CountingPmf counting_pmf(const CarmaHawkesParams& params, double t0, double T, const StateVector& X_t0, int n_max,
                         int grid_size, int n_steps, double epsilon, OdeScheme scheme) {
  if (n_max < 0) throw ValidationError("counting_pmf: n_max must be >= 0");
  check_state(params, X_t0);
  const int G = grid_size == 0 ? default_grid_size(n_max) : grid_size;
  if (G < 2 * n_max || G < 2 || (G & (G - 1)) != 0)
    throw ValidationError("counting_pmf: grid_size must be a power of two >= 2 n_max");
  const CompanionSystem sys(params);
  const CVec zero(sys.dim(), cplx{});

  // Hermitian symmetry: phi(2 pi - kappa) = conj(phi(kappa)).
  const int half = G / 2;
  CVec phi(half + 1);
  parallel_for(static_cast<std::size_t>(half + 1), [&](std::size_t j) {
    const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / G;
    phi[j] = transform(sys, params.mu, std::polar(1.0, kappa), zero, t0, T, X_t0, n_steps, scheme);
  });

  CountingPmf out;
  out.n_max = n_max;
  out.probs.assign(n_max + 1, 0.0);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double acc = phi[0].real() + (std::polar(1.0, -std::numbers::pi * n) * phi[half]).real();
    for (int j = 1; j < half; ++j) {
      const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / G;
      acc += 2.0 * (std::polar(1.0, -kappa * n) * phi[j]).real();
    }
    out.probs[n] = std::max(acc / G, 0.0);
    total += out.probs[n];
  }
  out.mass_deficit = 1.0 - total;
  if (out.mass_deficit > epsilon) {
    std::ostringstream msg;
    msg << "counting_pmf: mass deficit " << out.mass_deficit << " exceeds " << epsilon << " at n_max = " << n_max
        << "; raise n_max";
    throw NumericalError(msg.str());
  }
  return out;
}

CountingPmf counting_pmf_adaptive(const CarmaHawkesParams& params, double t0, double T, const StateVector& X_t0,
                                  double epsilon, int n_steps, OdeScheme scheme) {
  constexpr int kCap = 1 << 14;
  for (int n_max = 64;; n_max *= 2) {
    try {
      return counting_pmf(params, t0, T, X_t0, n_max, 0, n_steps, epsilon, scheme);
    } catch (const NumericalError&) {
      if (n_max >= kCap) throw;
    }
  }
}

namespace {

void check_mean_one(const JumpSpec& spec) {
  if (std::abs(exp_moment(spec) - 1.0) > 1e-10)
    throw ValidationError("series pricer requires E^Q[e^J] = 1 (mean-one jumps)");
}

// Terms n = 0..N where N is the first index with cumulative mass >= 1 - epsilon.
template <typename Term>
SeriesPrice sum_series(const CountingPmf& pmf, double S0, double epsilon, Term term) {
  SeriesPrice out;
  double mass = 0.0;
  for (int n = 0; n <= pmf.n_max; ++n) {
    out.price += term(n) * pmf.probs[n];
    mass += pmf.probs[n];
    out.terms = n + 1;
    if (mass >= 1.0 - epsilon) break;
  }
  out.error_bound = S0 * std::max(0.0, 1.0 - mass);
  return out;
}

}  // namespace

SeriesPrice toy_call_price(double K, double tau, double S0, double r, const JumpSpec& spec_Q, const CountingPmf& pmf,
                           double epsilon) {
  check_mean_one(spec_Q);
  if (!(K > 0.0) || !(tau > 0.0) || !(S0 > 0.0)) throw ValidationError("toy_call_price: need K, tau, S0 > 0");
  const double df = std::exp(-r * tau);
  const double d = std::log(K / S0) - r * tau;
  return sum_series(pmf, S0, epsilon, [&](int n) {
    if (n == 0) return std::max(S0 - K * df, 0.0);
    return S0 * (1.0 - jump_cdf_sum_tilted(spec_Q, n, d)) - K * df * (1.0 - jump_cdf_sum(spec_Q, n, d));
  });
}

SeriesPrice toy_call_price_with_diffusion(double K, double tau, double S0, double r, double sigma,
                                          const JumpSpec& spec_Q, const CountingPmf& pmf, double epsilon) {
  if (spec_Q.family != JumpFamily::Normal) throw ValidationError("diffusion series requires normal jumps");
  check_mean_one(spec_Q);
  const double sj2 = spec_Q.sigma_J * spec_Q.sigma_J;
  return sum_series(pmf, S0, epsilon, [&](int n) {
    const double sn = std::sqrt(sigma * sigma + n * sj2 / tau);
    return bs_price(S0, K, r, sn, tau, true);
  });
}

SeriesPrice toy_call_price(double K, double t0, double T, double S0, double r, const CarmaHawkesParams& params,
                           const JumpSpec& spec_Q, double epsilon, int n_steps) {
  const CountingPmf pmf = counting_pmf_adaptive(params, t0, T, {}, epsilon, n_steps);
  return toy_call_price(K, T - t0, S0, r, spec_Q, pmf, epsilon);
}

SeriesPrice toy_call_price_with_diffusion(double K, double t0, double T, double S0, double r, double sigma,
                                          const CarmaHawkesParams& params, const JumpSpec& spec_Q, double epsilon,
                                          int n_steps) {
  const CountingPmf pmf = counting_pmf_adaptive(params, t0, T, {}, epsilon, n_steps);
  return toy_call_price_with_diffusion(K, T - t0, S0, r, sigma, spec_Q, pmf, epsilon);
}

}  // namespace chawkes
