#pragma once

// Backward ODE systems for the log-affine characteristic function of ln S_T.

#include "chawkes/jump_models.hpp"
#include "chawkes/model_core.hpp"

namespace chawkes {

struct RiskNeutralModel {
  CarmaHawkesParams hawkes;
  JumpSpec jump_Q;
  double sigma = 0.0;
  double r = 0.0;
  double S0 = 100.0;
  StateVector X0;  // empty means zero
  double t0 = 0.0;

  /// Throws ValidationError unless the Hawkes part validates, the jump law is
  /// tagged Q, sigma >= 0 and S0 > 0.
  void check() const;
  StateVector initial_state() const;
};

enum class OdeScheme { Euler, RK4 };

struct OdeCoeffs {
  cplx u0;
  CVec u2;
  double u = 0.0;
  double horizon = 0.0;
};

/// Generic affine system solved backward from u0(T) = 0, u2(T) = u2_final:
///   du0/dt = mu (1 - psi e^{u2_p}) + c0
///   du2/dt = (1 - psi e^{u2_p}) b - A^T u2 + cb b
/// Returns the coefficients at t0 = T - horizon. Throws NumericalError with the
/// step index on non-finite values.
OdeCoeffs solve_affine_ode(const CompanionSystem& sys, double mu, cplx psi, cplx c0, cplx cb, const CVec& u2_final,
                           double horizon, int n_steps, OdeScheme scheme = OdeScheme::Euler);

/// Physical-measure system with risk premium phi.
OdeCoeffs solve_ode_P(double u1, const CarmaHawkesParams& params, const JumpSpec& jump_P, double phi, double r,
                      double horizon, int n_steps, OdeScheme scheme = OdeScheme::Euler);

/// Risk-neutral system.
OdeCoeffs solve_ode_Q(double u, const RiskNeutralModel& model, double horizon, int n_steps,
                      OdeScheme scheme = OdeScheme::Euler);

/// ln of E^Q[e^{iu ln S_T} | F_t0] assembled from a Q-solve.
cplx log_cf_from_coeffs(const OdeCoeffs& c, const RiskNeutralModel& model);

cplx cf_logprice(double u, const RiskNeutralModel& model, double T, int n_steps,
                 OdeScheme scheme = OdeScheme::Euler);

/// E^Q[S_T | F_t0] from the real-argument solve (transform evaluated at u = -i).
double forward_price(const RiskNeutralModel& model, double T, int n_steps, OdeScheme scheme = OdeScheme::Euler);

}  // namespace chawkes
