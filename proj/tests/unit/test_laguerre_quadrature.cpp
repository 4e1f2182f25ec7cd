#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chawkes/errors.hpp"
#include "chawkes/laguerre_quadrature.hpp"

using namespace chawkes;

namespace {

double factorial(int j) {
  double f = 1.0;
  for (int k = 2; k <= j; ++k) f *= k;
  return f;
}

}  // namespace

TEST_CASE("Laguerre polynomial evaluation") {
  CHECK(laguerre_eval(0, 3.7) == 1.0);
  CHECK(laguerre_eval(1, 1.0) == 0.0);
  CHECK(std::abs(laguerre_eval(2, 2.0 + std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(laguerre_eval(2, 2.0 - std::sqrt(2.0))) < 1e-12);
  // L_3(x) = (-x^3 + 9x^2 - 18x + 6) / 6
  for (double x : {0.0, 0.5, 2.0, 7.5}) {
    const double ref = (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0;
    CHECK(laguerre_eval(3, x) == doctest::Approx(ref).epsilon(1e-14));
    if (ref != 0.0) CHECK(laguerre_log_abs(3, x) == doctest::Approx(std::log(std::abs(ref))).epsilon(1e-13));
  }
}

TEST_CASE("low-order rules") {
  const QuadRule r1 = gauss_laguerre(1);
  CHECK(r1.nodes[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const QuadRule r2 = gauss_laguerre(2);
  const double s = std::sqrt(2.0);
  CHECK(r2.nodes[0] == doctest::Approx(2.0 - s).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(2.0 + s).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx((2.0 + s) / 4.0).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx((2.0 - s) / 4.0).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(0.853553).epsilon(1e-6));

  const QuadRule r4 = gauss_laguerre(4);
  double m3 = 0.0;
  for (int k = 0; k < 4; ++k) m3 += r4.weights[k] * std::pow(r4.nodes[k], 3);
  CHECK(m3 == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("moment exactness") {
  for (int m : {2, 8, 32}) {
    const QuadRule r = gauss_laguerre(m);
    for (int j = 0; j <= 2 * m - 1; ++j) {
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += std::exp(std::log(r.weights[k]) + j * std::log(r.nodes[k]));
      CHECK(sum == doctest::Approx(factorial(j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("zeroth moment, ordering and interlacing") {
  for (int m : {3, 10, 64, 200, 450}) {
    const QuadRule r = gauss_laguerre(m);
    const QuadRule prev = gauss_laguerre(m - 1);
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
      sum += r.weights[k];
      CHECK(r.nodes[k] > 0.0);
      CHECK(r.weights[k] >= 0.0);
      if (k > 0) CHECK(r.nodes[k] > r.nodes[k - 1]);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < m - 1; ++k) {
      CHECK(r.nodes[k] < prev.nodes[k]);
      CHECK(prev.nodes[k] < r.nodes[k + 1]);
    }
  }
}

TEST_CASE("eigenvector weights agree with the closed formula") {
  for (int m = 1; m <= 64; ++m) {
    const QuadRule r = gauss_laguerre(m);
    for (int k = 0; k < m; ++k) {
      const double lw = log_weight_closed_form(m, r.nodes[k]);
      if (r.weights[k] > 1e-300) CHECK(std::exp(lw) == doctest::Approx(r.weights[k]).epsilon(1e-10));
      CHECK(std::abs(lw - (r.log_scaled[k] - r.nodes[k])) < 1e-10 * std::max(1.0, std::abs(lw)));
    }
  }
}

TEST_CASE("scaled weights stay finite and consistent") {
  const QuadRule r = gauss_laguerre(450);
  for (int k = 0; k < 450; ++k) {
    CHECK(std::isfinite(r.log_scaled[k]));
    if (r.weights[k] > 1e-290) CHECK(std::exp(r.log_scaled[k]) * std::exp(-r.nodes[k]) == doctest::Approx(r.weights[k]).epsilon(1e-12));
  }
}

TEST_CASE("high-order rules against extended-precision references") {
  // Nodes Newton-polished at 60 digits; weights from the closed formula at the same precision.
  struct Ref {
    int m, k;
    double node, log_scaled;
  };
  const Ref refs[] = {
      {450, 0, 0.0032093164311137816816, -4.7992226129779669034},
      {450, 1, 0.016909739956082015695, -3.9542897830289679966},
      {450, 225, 295.46495494784386038, 1.0233679280230452581},
      {450, 449, 1757.06199182035261, 3.6607666929540119742},
      {2000, 0, 0.00072271758021023132698, -6.2900178964387473224},
      {2000, 1000, 1307.2660899168821806, 1.0211854280493165252},
      {2000, 1999, 7927.9014222639729604, 4.1640848496185816231},
  };
  const QuadRule r450 = gauss_laguerre(450);
  const QuadRule r2000 = gauss_laguerre(2000);
  for (const Ref& ref : refs) {
    const QuadRule& r = ref.m == 450 ? r450 : r2000;
    CHECK(r.nodes[ref.k] == doctest::Approx(ref.node).epsilon(1e-13));
    CHECK(std::abs(r.log_scaled[ref.k] - ref.log_scaled) < 1e-9);
  }
}

TEST_CASE("tridiagonal eigenvalues") {
  const RVec ev = tridiagonal_eigenvalues({2.0, 2.0, 2.0}, {-1.0, -1.0});
  CHECK(ev[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ev[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("order bounds") {
  CHECK_THROWS_AS(gauss_laguerre(0), ValidationError);
  CHECK_THROWS_AS(gauss_laguerre(kMaxQuadOrder + 1), ValidationError);
}
