#include "chawkes/jump_models.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "chawkes/errors.hpp"
#include "chawkes/normal.hpp"

namespace chawkes {

JumpSpec JumpSpec::normal(double mu_J, double sigma_J, Measure m) {
  JumpSpec s;
  s.family = JumpFamily::Normal;
  s.measure = m;
  s.mu_J = mu_J;
  s.sigma_J = sigma_J;
  s.check();
  return s;
}

JumpSpec JumpSpec::shifted_gamma(double alpha, double beta, Measure m) {
  if (!(beta > 1.0)) throw ValidationError("shifted gamma: rate beta must be > 1");
  return shifted_gamma(alpha, beta, alpha * std::log1p(-1.0 / beta), m);
}

JumpSpec JumpSpec::shifted_gamma(double alpha, double beta, double shift, Measure m) {
  JumpSpec s;
  s.family = JumpFamily::ShiftedGamma;
  s.measure = m;
  s.alpha = alpha;
  s.beta = beta;
  s.shift = shift;
  s.check();
  return s;
}

void JumpSpec::check() const {
  if (family == JumpFamily::Normal) {
    if (!std::isfinite(mu_J) || !(sigma_J >= 0.0) || !std::isfinite(sigma_J))
      throw ValidationError("normal jumps: need finite mu_J and sigma_J >= 0");
  } else {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("shifted gamma: shape alpha must be > 0");
    if (!(beta > 1.0) || !std::isfinite(beta)) throw ValidationError("shifted gamma: rate beta must be > 1");
    if (!std::isfinite(shift)) throw ValidationError("shifted gamma: non-finite shift");
  }
}

double JumpSpec::mgf_upper() const {
  return family == JumpFamily::Normal ? std::numeric_limits<double>::infinity() : beta;
}

std::string to_string(JumpFamily f) { return f == JumpFamily::Normal ? "normal" : "shifted_gamma"; }
std::string to_string(Measure m) { return m == Measure::P ? "P" : "Q"; }

cplx jump_cgf(const JumpSpec& spec, cplx z) {
  if (spec.family == JumpFamily::Normal) return spec.mu_J * z + 0.5 * spec.sigma_J * spec.sigma_J * z * z;
  if (!(z.real() < spec.beta)) {
    std::ostringstream msg;
    msg << "jump_cgf: Re(z) = " << z.real() << " outside the mgf domain (< " << spec.beta << ")";
    throw ValidationError(msg.str());
  }
  return -spec.alpha * std::log(1.0 - z / spec.beta) + z * spec.shift;
}

cplx jump_cf(const JumpSpec& spec, double u) { return std::exp(jump_cgf(spec, cplx(0.0, u))); }

double exp_moment(const JumpSpec& spec) { return std::exp(jump_cgf(spec, 1.0).real()); }

namespace {

void check_phi(double phi) {
  if (!(phi < 1.0) || !std::isfinite(phi)) throw ValidationError("risk premium phi must be < 1");
}

}  // namespace

EsscherSolution solve_theta_star(const JumpSpec& spec_P, double phi) {
  check_phi(phi);
  if (spec_P.family == JumpFamily::ShiftedGamma) return solve_theta_star_numeric(spec_P, phi);
  if (!(spec_P.sigma_J > 0.0)) throw ValidationError("solve_theta_star: degenerate normal jumps (sigma_J = 0)");
  const double s2 = spec_P.sigma_J * spec_P.sigma_J;
  return {(std::log1p(-phi) - spec_P.mu_J) / s2 - 0.5, phi};
}

EsscherSolution solve_theta_star_numeric(const JumpSpec& spec_P, double phi) {
  check_phi(phi);
  const double target = std::log1p(-phi);
  auto g = [&](double theta) {
    return jump_cgf(spec_P, theta + 1.0).real() - jump_cgf(spec_P, theta).real() - target;
  };
  // theta + 1 must stay inside the open mgf domain.
  const double upper = spec_P.mgf_upper() - 1.0;
  double lo = -1.0;
  double hi = std::min(1.0, upper - 0.5 * (upper - lo));
  if (!(hi > lo)) throw NumericalError("solve_theta_star: empty search bracket");
  double glo = g(lo);
  double ghi = g(hi);
  for (int k = 0; k < 200 && glo * ghi > 0.0; ++k) {
    if (glo > 0.0) {
      lo = hi - 2.0 * (hi - lo);
      glo = g(lo);
    } else {
      hi = std::isfinite(upper) ? upper - 0.5 * (upper - hi) : hi + 2.0 * (hi - lo);
      ghi = g(hi);
    }
  }
  if (glo * ghi > 0.0) throw NumericalError("solve_theta_star: no sign change in the search bracket");
  if (glo == 0.0) return {lo, phi};
  if (ghi == 0.0) return {hi, phi};

  boost::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
  const double theta = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
  if (std::abs(g(theta)) > 1e-12) throw NumericalError("solve_theta_star: residual above 1e-12");
  return {theta, phi};
}

JumpSpec esscher_transform(const JumpSpec& spec_P, double theta_star) {
  if (spec_P.measure == Measure::Q) throw ValidationError("esscher_transform: spec is already a Q-measure law");
  if (spec_P.family == JumpFamily::Normal) {
    return JumpSpec::normal(spec_P.mu_J + theta_star * spec_P.sigma_J * spec_P.sigma_J, spec_P.sigma_J, Measure::Q);
  }
  const double rate = spec_P.beta - theta_star;
  if (!(rate > 1.0)) throw ValidationError("esscher_transform: tilted gamma rate beta - theta must be > 1");
  return JumpSpec::shifted_gamma(spec_P.alpha, rate, spec_P.shift, Measure::Q);
}

namespace {

double cdf_sum(const JumpSpec& spec, int n, double x, bool tilted) {
  if (n < 1) throw ValidationError("jump_cdf_sum: n must be >= 1");
  const double nn = static_cast<double>(n);
  if (spec.family == JumpFamily::Normal) {
    const double mean = nn * (spec.mu_J + (tilted ? spec.sigma_J * spec.sigma_J : 0.0));
    const double sd = spec.sigma_J * std::sqrt(nn);
    if (sd == 0.0) return x >= mean ? 1.0 : 0.0;
    return normal_cdf((x - mean) / sd);
  }
  const double y = x - nn * spec.shift;
  if (y <= 0.0) return 0.0;
  const double rate = tilted ? spec.beta - 1.0 : spec.beta;
  if (std::isinf(y)) return 1.0;
  return boost::math::gamma_p(spec.alpha * nn, rate * y);
}

}  // namespace

double jump_cdf_sum(const JumpSpec& spec, int n, double x) { return cdf_sum(spec, n, x, false); }

double jump_cdf_sum_tilted(const JumpSpec& spec, int n, double x) { return cdf_sum(spec, n, x, true); }

}  // namespace chawkes
