#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "chawkes/errors.hpp"
#include "chawkes/jump_models.hpp"
#include "chawkes/normal.hpp"

using namespace chawkes;

TEST_CASE("cumulant generating function") {
  CHECK(std::abs(jump_cgf(JumpSpec::normal(0.0, 0.45), 0.0)) == 0.0);
  const double s = 0.45;
  CHECK(std::abs(jump_cgf(JumpSpec::normal(-s * s / 2, s), 1.0)) < 1e-16);
  CHECK(std::abs(jump_cgf(JumpSpec::shifted_gamma(2.0, 3.0), 1.0)) < 1e-15);
  // complex argument: normal cf
  const cplx cf = jump_cf(JumpSpec::normal(0.1, 0.3), 2.0);
  CHECK(std::abs(cf - std::exp(cplx(-0.5 * 0.09 * 4.0, 0.2))) < 1e-15);
  CHECK_THROWS_AS(jump_cgf(JumpSpec::shifted_gamma(2.0, 3.0), 3.5), ValidationError);
}

TEST_CASE("exponential moment") {
  CHECK(exp_moment(JumpSpec::normal(0.0, 0.45)) == doctest::Approx(1.1065532454978906).epsilon(1e-14));
  CHECK(exp_moment(JumpSpec::normal(-0.10125, 0.45)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exp_moment(JumpSpec::shifted_gamma(2.0, 3.0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid laws") {
  CHECK_THROWS_AS(JumpSpec::normal(0.0, -0.1), ValidationError);
  CHECK_THROWS_AS(JumpSpec::shifted_gamma(2.0, 1.0), ValidationError);
  CHECK_THROWS_AS(JumpSpec::shifted_gamma(-1.0, 3.0), ValidationError);
}

TEST_CASE("theta star") {
  const double s = 0.45;
  CHECK(solve_theta_star(JumpSpec::normal(-s * s / 2, s), 0.0).theta_star == doctest::Approx(0.0).epsilon(1e-14));
  const EsscherSolution e = solve_theta_star(JumpSpec::normal(0.0, 0.45), 0.1);
  CHECK(e.theta_star == doctest::Approx(-1.0202988427546975).epsilon(1e-13));
  CHECK(std::abs(solve_theta_star(JumpSpec::shifted_gamma(2.0, 3.0), 0.0).theta_star) < 1e-12);
  CHECK_THROWS_AS(solve_theta_star(JumpSpec::normal(0.0, 0.45), 1.0), ValidationError);
  CHECK_THROWS_AS(solve_theta_star(JumpSpec::normal(0.0, 0.0), 0.1), ValidationError);

  // closed form vs root finder
  for (double phi : {-0.5, -0.1, 0.0, 0.2, 0.6}) {
    for (const JumpSpec& spec : {JumpSpec::normal(0.0, 0.45), JumpSpec::normal(-0.3, 0.2), JumpSpec::normal(0.5, 1.1)}) {
      CHECK(std::abs(solve_theta_star(spec, phi).theta_star - solve_theta_star_numeric(spec, phi).theta_star) < 1e-10);
    }
  }
}

TEST_CASE("Esscher transform") {
  const JumpSpec n = JumpSpec::normal(0.0, 0.45);
  CHECK(esscher_transform(n, 0.0).mu_J == 0.0);
  CHECK(esscher_transform(n, 0.0).measure == Measure::Q);
  const JumpSpec q = esscher_transform(n, -1.0202988427546975);
  CHECK(q.mu_J == doctest::Approx(-0.20661051565782626).epsilon(1e-13));
  CHECK(q.sigma_J == 0.45);
  CHECK_THROWS_AS(esscher_transform(q, 0.1), ValidationError);

  const JumpSpec g = JumpSpec::shifted_gamma(2.0, 3.0);
  const JumpSpec gq = esscher_transform(g, 1.0);
  CHECK(gq.beta == 2.0);
  CHECK(gq.alpha == 2.0);
  CHECK(gq.shift == g.shift);
  CHECK_THROWS_AS(esscher_transform(g, 2.5), ValidationError);

  // martingale re-check
  for (double phi : {-0.4, 0.0, 0.1, 0.5}) {
    for (const JumpSpec& spec : {n, JumpSpec::normal(0.2, 0.3), g, JumpSpec::shifted_gamma(1.5, 4.0)}) {
      if (spec.family == JumpFamily::ShiftedGamma && std::log(1.0 - phi) <= spec.shift) {
        CHECK_THROWS(solve_theta_star(spec, phi));
        continue;
      }
      const EsscherSolution sol = solve_theta_star(spec, phi);
      CHECK(exp_moment(esscher_transform(spec, sol.theta_star)) == doctest::Approx(1.0 - phi).epsilon(1e-10));
    }
  }
}

TEST_CASE("tilt consistency by importance sampling") {
  std::mt19937_64 gen(11);
  for (const JumpSpec& p : {JumpSpec::normal(0.0, 0.45), JumpSpec::shifted_gamma(2.0, 3.0)}) {
    const double theta = solve_theta_star(p, 0.1).theta_star;
    const JumpSpec q = esscher_transform(p, theta);
    const double norm = std::exp(jump_cgf(p, theta).real());
    std::normal_distribution<double> nd(q.mu_J, q.sigma_J);
    std::gamma_distribution<double> gd(q.alpha, 1.0 / std::max(q.beta, 1.0));
    const int n = 1000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double j = p.family == JumpFamily::Normal ? nd(gen) : gd(gen) + q.shift;
      const double w = std::exp(-theta * j) * norm;
      sum += w;
      sq += w * w;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - 1.0) < 3.0 * se);
  }
}

TEST_CASE("distribution of jump sums") {
  const double s = 0.45;
  const JumpSpec m1 = JumpSpec::normal(-s * s / 2, s);
  CHECK(jump_cdf_sum(m1, 1, -s * s / 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(jump_cdf_sum(m1, 4, 0.0) == doctest::Approx(0.67364477971208).epsilon(1e-13));
  CHECK(jump_cdf_sum_tilted(m1, 4, 0.0) == doctest::Approx(normal_cdf(-0.45)).epsilon(1e-14));
  for (const JumpSpec& spec : {m1, JumpSpec::shifted_gamma(2.0, 3.0)}) {
    CHECK(jump_cdf_sum(spec, 3, 1e300) == 1.0);
    CHECK(jump_cdf_sum_tilted(spec, 3, 1e300) == 1.0);
  }
  CHECK_THROWS_AS(jump_cdf_sum(m1, 0, 0.0), ValidationError);

  // monotone and equal to numerical convolution for n <= 3
  using boost::math::quadrature::gauss_kronrod;
  for (const JumpSpec& spec : {JumpSpec::normal(-0.1, 0.3), JumpSpec::shifted_gamma(2.0, 3.0)}) {
    auto density = [&](double j) {
      if (spec.family == JumpFamily::Normal) return normal_pdf((j - spec.mu_J) / spec.sigma_J) / spec.sigma_J;
      const double y = j - spec.shift;
      if (y <= 0.0) return 0.0;
      return std::pow(spec.beta, spec.alpha) * std::pow(y, spec.alpha - 1.0) * std::exp(-spec.beta * y) /
             std::tgamma(spec.alpha);
    };
    const double lo = spec.family == JumpFamily::Normal ? spec.mu_J - 12 * spec.sigma_J : spec.shift;
    const double hi = spec.family == JumpFamily::Normal ? spec.mu_J + 12 * spec.sigma_J : spec.shift + 40.0;
    for (double x : {-0.8, -0.2, 0.0, 0.3, 1.1}) {
      // F_2(x) = int f(j) F_1(x - j) dj, F_3(x) = int f(j) F_2(x - j) dj
      auto f2 = [&](double y) {
        return gauss_kronrod<double, 61>::integrate([&](double j) { return density(j) * jump_cdf_sum(spec, 1, y - j); },
                                                    lo, hi, 12, 1e-12);
      };
      const double c2 = f2(x);
      const double c3 = gauss_kronrod<double, 31>::integrate([&](double j) { return density(j) * f2(x - j); }, lo, hi,
                                                             6, 1e-10);
      CHECK(std::abs(c2 - jump_cdf_sum(spec, 2, x)) < 1e-6);
      CHECK(std::abs(c3 - jump_cdf_sum(spec, 3, x)) < 1e-6);
      // tilted law: e^y f_Y(y) / E[e^Y]
      const double m = std::exp(jump_cgf(spec, 1.0).real());
      const double upper = std::min(hi, x);
      const double t1 = upper <= lo ? 0.0
                                    : gauss_kronrod<double, 61>::integrate(
                                          [&](double j) { return std::exp(j) * density(j) / m; }, lo, upper, 12, 1e-12);
      CHECK(std::abs(t1 - jump_cdf_sum_tilted(spec, 1, x)) < 1e-6);
    }
    double prev = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.05) {
      const double v = jump_cdf_sum(spec, 3, x);
      CHECK(v >= prev);
      prev = v;
    }
  }
}
