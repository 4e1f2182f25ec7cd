#pragma once

// Log-price jump laws (normal, shifted gamma) and the Esscher change of measure.

#include <string>

#include "chawkes/linalg.hpp"

namespace chawkes {

enum class JumpFamily { Normal, ShiftedGamma };
enum class Measure { P, Q };

struct JumpSpec {
  JumpFamily family = JumpFamily::Normal;
  Measure measure = Measure::P;
  // Normal
  double mu_J = 0.0;
  double sigma_J = 0.0;
  // ShiftedGamma: J = Gamma(alpha, rate beta) + shift
  double alpha = 0.0;
  double beta = 0.0;
  double shift = 0.0;

  static JumpSpec normal(double mu_J, double sigma_J, Measure m = Measure::P);
  /// Mean-one construction: shift = alpha * ln(1 - 1/beta), so E[e^J] = 1.
  static JumpSpec shifted_gamma(double alpha, double beta, Measure m = Measure::P);
  static JumpSpec shifted_gamma(double alpha, double beta, double shift, Measure m);

  /// Throws ValidationError when the parameters are outside the family's domain.
  void check() const;
  /// Right end of the real mgf domain (+inf for normal).
  double mgf_upper() const;
};

std::string to_string(JumpFamily f);
std::string to_string(Measure m);

/// ln E[e^{zJ}].
cplx jump_cgf(const JumpSpec& spec, cplx z);
/// E[e^{iuJ}].
cplx jump_cf(const JumpSpec& spec, double u);
/// E[e^J].
double exp_moment(const JumpSpec& spec);

struct EsscherSolution {
  double theta_star = 0.0;
  double phi = 0.0;
};

/// Solves E[e^{(theta+1)J}] / E[e^{theta J}] = 1 - phi.
EsscherSolution solve_theta_star(const JumpSpec& spec_P, double phi);
/// Numerical root of the same equation, used for the gamma family and as a
/// cross-check of the normal closed form.
EsscherSolution solve_theta_star_numeric(const JumpSpec& spec_P, double phi);

/// Tilted law f(j) e^{theta j} / E[e^{theta J}], tagged Q.
JumpSpec esscher_transform(const JumpSpec& spec_P, double theta_star);

/// P(J_1 + ... + J_n <= x).
double jump_cdf_sum(const JumpSpec& spec, int n, double x);
/// Same probability under the exponentially tilted law e^{y} f_{Y_n}(y) / E[e^{Y_n}].
double jump_cdf_sum_tilted(const JumpSpec& spec, int n, double x);

}  // namespace chawkes
