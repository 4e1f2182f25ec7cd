#include "chawkes/charfn_engine.hpp"

#include <cmath>
#include <sstream>

#include "chawkes/errors.hpp"

namespace chawkes {

void RiskNeutralModel::check() const {
  const Diagnostics d = validate(hawkes);
  if (!d.pass) throw ValidationError("invalid CARMA-Hawkes parameters: " + d.message);
  jump_Q.check();
  if (jump_Q.measure != Measure::Q) throw ValidationError("pricing requires a Q-measure jump law");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be >= 0");
  if (!(S0 > 0.0) || !std::isfinite(S0)) throw ValidationError("S0 must be > 0");
  if (!std::isfinite(r)) throw ValidationError("r must be finite");
  if (!X0.empty() && X0.size() != hawkes.p()) throw ValidationError("X0 length must equal p");
}

StateVector RiskNeutralModel::initial_state() const {
  return X0.empty() ? StateVector(hawkes.p(), 0.0) : X0;
}

namespace {

struct Rhs {
  const CompanionSystem& sys;
  double mu;
  cplx psi, c0, cb;

  // Writes d/dt of (u0, u2) into (d0, d2).
  void operator()(const CVec& u2, cplx& d0, CVec& d2) const {
    const std::size_t p = sys.dim();
    const cplx g = 1.0 - psi * std::exp(u2[p - 1]);
    d0 = mu * g + c0;
    const RMatrix& A = sys.A();
    for (std::size_t i = 0; i < p; ++i) {
      cplx at = 0.0;
      for (std::size_t k = 0; k < p; ++k) at += A(k, i) * u2[k];
      d2[i] = (g + cb) * sys.b()[i] - at;
    }
  }
};

void check_finite(cplx u0, const CVec& u2, int step) {
  bool ok = std::isfinite(u0.real()) && std::isfinite(u0.imag());
  for (const cplx& v : u2) ok = ok && std::isfinite(v.real()) && std::isfinite(v.imag());
  if (!ok) {
    std::ostringstream msg;
    msg << "ODE solve produced non-finite values at step " << step;
    throw NumericalError(msg.str());
  }
}

}  // namespace

OdeCoeffs solve_affine_ode(const CompanionSystem& sys, double mu, cplx psi, cplx c0, cplx cb, const CVec& u2_final,
                           double horizon, int n_steps, OdeScheme scheme) {
  if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
  if (!(horizon >= 0.0)) throw ValidationError("horizon must be >= 0");
  const std::size_t p = sys.dim();
  if (u2_final.size() != p) throw ValidationError("final condition has the wrong dimension");
  const Rhs f{sys, mu, psi, c0, cb};
  const double h = horizon / n_steps;

  cplx u0 = 0.0;
  CVec u2 = u2_final;
  CVec d2(p), k2(p), tmp(p), acc2(p);
  cplx d0;
  for (int step = 0; step < n_steps; ++step) {
    if (scheme == OdeScheme::Euler) {
      f(u2, d0, d2);
      u0 -= h * d0;
      for (std::size_t i = 0; i < p; ++i) u2[i] -= h * d2[i];
    } else {
      // Classical RK4 in reversed time s = T - t, du/ds = -f(u).
      cplx acc0 = 0.0;
      const double coef[4] = {1.0, 2.0, 2.0, 1.0};
      const double frac[4] = {0.0, 0.5, 0.5, 1.0};
      std::fill(acc2.begin(), acc2.end(), cplx{});
      std::fill(k2.begin(), k2.end(), cplx{});
      for (int stage = 0; stage < 4; ++stage) {
        for (std::size_t i = 0; i < p; ++i) tmp[i] = u2[i] - frac[stage] * h * k2[i];
        f(tmp, d0, k2);
        acc0 += coef[stage] * d0;
        for (std::size_t i = 0; i < p; ++i) acc2[i] += coef[stage] * k2[i];
      }
      u0 -= h / 6.0 * acc0;
      for (std::size_t i = 0; i < p; ++i) u2[i] -= h / 6.0 * acc2[i];
    }
    check_finite(u0, u2, step + 1);
  }
  return {u0, u2, 0.0, horizon};
}

OdeCoeffs solve_ode_P(double u1, const CarmaHawkesParams& params, const JumpSpec& jump_P, double phi, double r,
                      double horizon, int n_steps, OdeScheme scheme) {
  const CompanionSystem sys(params);
  const cplx iu(0.0, u1);
  OdeCoeffs c = solve_affine_ode(sys, params.mu, jump_cf(jump_P, u1), -iu * (r + phi * params.mu), -iu * phi,
                                 CVec(sys.dim(), cplx{}), horizon, n_steps, scheme);
  c.u = u1;
  return c;
}

OdeCoeffs solve_ode_Q(double u, const RiskNeutralModel& model, double horizon, int n_steps, OdeScheme scheme) {
  const CompanionSystem sys(model.hawkes);
  const double k = exp_moment(model.jump_Q) - 1.0;
  const cplx iu(0.0, u);
  const double mu = model.hawkes.mu;
  OdeCoeffs c = solve_affine_ode(sys, mu, jump_cf(model.jump_Q, u), -iu * (model.r - mu * k), iu * k,
                                 CVec(sys.dim(), cplx{}), horizon, n_steps, scheme);
  c.u = u;
  return c;
}

cplx log_cf_from_coeffs(const OdeCoeffs& c, const RiskNeutralModel& model) {
  const double s2tau = model.sigma * model.sigma * c.horizon;
  const cplx iu(0.0, c.u);
  cplx out = iu * std::log(model.S0) - iu * 0.5 * s2tau - 0.5 * c.u * c.u * s2tau + c.u0;
  if (!model.X0.empty())
    for (std::size_t i = 0; i < c.u2.size(); ++i) out += c.u2[i] * model.X0[i];
  return out;
}

cplx cf_logprice(double u, const RiskNeutralModel& model, double T, int n_steps, OdeScheme scheme) {
  const double tau = T - model.t0;
  if (!(tau > 0.0)) throw ValidationError("maturity must exceed t0");
  return std::exp(log_cf_from_coeffs(solve_ode_Q(u, model, tau, n_steps, scheme), model));
}

double forward_price(const RiskNeutralModel& model, double T, int n_steps, OdeScheme scheme) {
  const double tau = T - model.t0;
  if (!(tau > 0.0)) throw ValidationError("maturity must exceed t0");
  const CompanionSystem sys(model.hawkes);
  const double m1 = exp_moment(model.jump_Q);
  const double mu = model.hawkes.mu;
  const OdeCoeffs c = solve_affine_ode(sys, mu, m1, -(model.r - mu * (m1 - 1.0)), m1 - 1.0, CVec(sys.dim(), cplx{}),
                                       tau, n_steps, scheme);
  double log_fwd = std::log(model.S0) + c.u0.real();
  if (!model.X0.empty())
    for (std::size_t i = 0; i < c.u2.size(); ++i) log_fwd += c.u2[i].real() * model.X0[i];
  if (!std::isfinite(log_fwd)) throw NumericalError("forward_price: real-argument solve diverged");
  return std::exp(log_fwd);
}

}  // namespace chawkes
