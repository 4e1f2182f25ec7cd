#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "chawkes/errors.hpp"
#include "chawkes/path_simulator.hpp"
#include "chawkes/toy_model.hpp"

using namespace chawkes;

namespace {

const double kPi = std::numbers::pi;

CarmaHawkesParams hawkes_params() { return {3.0, {3.0}, {1.0}}; }
CarmaHawkesParams carma21_params() { return {3.0, {3.0, 2.0}, {1.0, 0.3}}; }
CarmaHawkesParams carma31_params() {
  return {3.0, {1.3, 0.34 + kPi * kPi / 4.0, 0.025 + 0.025 * kPi * kPi}, {0.2, 0.3}};
}

RiskNeutralModel make(CarmaHawkesParams h, double sigma = 0.2) {
  RiskNeutralModel m;
  m.hawkes = std::move(h);
  m.jump_Q = JumpSpec::normal(0.0, 0.45, Measure::Q);
  m.sigma = sigma;
  m.r = 0.05;
  m.S0 = 100.0;
  return m;
}

// lambda(t) rebuilt event by event, integrated piecewise by adaptive Gauss-Kronrod.
double quadrature_compensator(const CarmaHawkes& h, const RVec& times, double t0, StateVector x, double T) {
  double total = 0.0, left = t0;
  auto piece = [&](double a, double b, const StateVector& xa) {
    if (b <= a) return 0.0;
    auto f = [&](double t) { return h.intensity(h.propagate_state(xa, t - a)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-11);
  };
  for (double t : times) {
    total += piece(left, t, x);
    x = h.add_jump(h.propagate_state(x, t - left));
    left = t;
  }
  return total + piece(left, T, x);
}

double ks_statistic_exp1(RVec xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = 1.0 - std::exp(-xs[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

}  // namespace

TEST_CASE("thinning bound coefficient") {
  const ThinningBound b1 = bound_coeff(CarmaHawkes(hawkes_params()));
  CHECK(b1.c == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b1.decay == doctest::Approx(-3.0).epsilon(1e-14));

  for (const CarmaHawkesParams& p : {carma21_params(), carma31_params()}) {
    const CarmaHawkes h(p);
    const ThinningBound b = bound_coeff(h);
    const double horizon = 10.0 / std::abs(b.decay);
    for (int i = 0; i <= 4096; ++i) CHECK(h.kernel(horizon * i / 4096.0) <= b.c + 1e-12);
    CarmaHawkesParams p2 = p;
    for (double& v : p2.b_raw) v *= 2.0;
    CHECK(bound_coeff(CarmaHawkes(p2)).c == doctest::Approx(2.0 * b.c).epsilon(1e-13));
  }
}

TEST_CASE("Poisson degeneracy") {
  const CarmaHawkes h(CarmaHawkesParams{3.0, {3.0}, {0.0}});
  double sum = 0.0;
  const int M = 10000;
  for (int i = 0; i < M; ++i) {
    SplitMix64 rng = path_stream(101, i);
    sum += simulate_arrivals(h, 1.0, rng).N_T;
  }
  CHECK(std::abs(sum / M - 3.0) < 3.0 * std::sqrt(3.0 / M));
}

TEST_CASE("dominance of the thinning bound") {
  for (const CarmaHawkesParams& p : {hawkes_params(), carma21_params(), carma31_params()}) {
    const CarmaHawkes h(p);
    const bool scalar = p.p() == 1;
    long candidates = 0, violations = 0, mismatches = 0, bad_ratio = 0;
    const CandidateObserver obs = [&](const Candidate& c) {
      ++candidates;
      if (c.intensity > c.bound * (1.0 + 1e-12)) ++violations;
      if (c.intensity > c.rate) ++violations;
      const double ratio = c.intensity / c.rate;
      if (!(ratio > 0.0 && ratio <= 1.0)) ++bad_ratio;
      if (scalar && std::abs(c.bound - c.intensity) > 1e-12 * c.bound) ++mismatches;
    };
    for (int i = 0; candidates < 20000; ++i) {
      SplitMix64 rng = path_stream(202, i);
      simulate_arrivals(h, 5.0, rng, 0.0, {}, obs);
    }
    CHECK(violations == 0);
    CHECK(bad_ratio == 0);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("arrival records are consistent") {
  const CarmaHawkes h(carma21_params());
  for (int i = 0; i < 50; ++i) {
    SplitMix64 rng = path_stream(303, i);
    const ArrivalRecord rec = simulate_arrivals(h, 2.0, rng);
    CHECK(rec.N_T == static_cast<int>(rec.times.size()));
    StateVector x(2, 0.0);
    double left = 0.0;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      CHECK(rec.times[k] > left);
      CHECK(rec.times[k] <= 2.0);
      x = h.add_jump(h.propagate_state(x, rec.times[k] - left));
      left = rec.times[k];
    }
    x = h.propagate_state(x, 2.0 - left);
    for (int j = 0; j < 2; ++j) CHECK(rec.X_T[j] == doctest::Approx(x[j]).epsilon(1e-12).scale(1.0));
  }
  SplitMix64 rng(9);
  const ArrivalRecord empty = simulate_arrivals(h, 1e-12, rng);
  CHECK(empty.N_T == 0);
  CHECK(empty.times.empty());
}

TEST_CASE("closed-form compensator") {
  const CarmaHawkes h1(hawkes_params());
  ArrivalRecord none;
  none.X_T = {0.0};
  CHECK(integrated_intensity(none, h1, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  ArrivalRecord one;
  one.times = {0.5};
  one.N_T = 1;
  CHECK(integrated_intensity(one, h1, 1.0) == doctest::Approx(3.0 + (1.0 - std::exp(-1.5)) / 3.0).epsilon(1e-14));

  for (const CarmaHawkesParams& p : {carma21_params(), carma31_params()}) {
    const CarmaHawkes h(p);
    for (int i = 0; i < 100; ++i) {
      SplitMix64 rng = path_stream(404, i);
      const bool shifted = i % 2 == 1;
      const double t0 = shifted ? 0.3 : 0.0;
      StateVector x0(p.p(), 0.0);
      if (shifted) x0.back() = 0.7 + 0.01 * i;
      const ArrivalRecord rec = simulate_arrivals(h, 3.0, rng, t0, shifted ? x0 : StateVector{});
      const double closed = integrated_intensity(rec, h, 3.0, t0, shifted ? x0 : StateVector{});
      const double quad = quadrature_compensator(h, rec.times, t0, x0, 3.0);
      CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
  }
}

TEST_CASE("time-rescaled inter-arrivals are unit exponential") {
  for (const CarmaHawkesParams& p : {hawkes_params(), carma21_params(), carma31_params()}) {
    const CarmaHawkes h(p);
    RVec increments;
    for (int i = 0; increments.size() < 10000; ++i) {
      SplitMix64 rng = path_stream(505, i);
      // Long paths: the censored gap after the last event biases short horizons.
      const ArrivalRecord rec = simulate_arrivals(h, 200.0, rng);
      double prev = 0.0;
      ArrivalRecord partial;
      for (std::size_t k = 0; k < rec.times.size(); ++k) {
        partial.times.push_back(rec.times[k]);
        partial.N_T = static_cast<int>(k + 1);
        const double cum = integrated_intensity(partial, h, rec.times[k]);
        increments.push_back(cum - prev);
        prev = cum;
      }
    }
    const double n = static_cast<double>(increments.size());
    // Asymptotic one-sample Kolmogorov-Smirnov critical value at the 1% level.
    CHECK(ks_statistic_exp1(increments) < 1.6276 / std::sqrt(n));
  }
}

TEST_CASE("counting law agrees with the transform inversion") {
  const CarmaHawkesParams p = hawkes_params();
  const CarmaHawkes h(p);
  const CountingPmf pmf = counting_pmf_adaptive(p, 0.0, 0.25, {0.0});
  const int M = 100000;
  RVec counts(pmf.probs.size() + 1, 0.0);
  double mean = 0.0;
  for (int i = 0; i < M; ++i) {
    SplitMix64 rng = path_stream(606, i);
    const int n = simulate_arrivals(h, 0.25, rng).N_T;
    counts[std::min<std::size_t>(n, pmf.probs.size())] += 1.0;
    mean += n;
  }
  mean /= M;
  double tv = 0.0, pmf_mean = 0.0, pmf_sq = 0.0;
  for (std::size_t n = 0; n < pmf.probs.size(); ++n) {
    tv += std::abs(counts[n] / M - pmf.probs[n]);
    pmf_mean += n * pmf.probs[n];
    pmf_sq += n * n * pmf.probs[n];
  }
  tv += counts.back() / M;
  CHECK(0.5 * tv < 0.01);
  const double se = std::sqrt((pmf_sq - pmf_mean * pmf_mean) / M);
  CHECK(std::abs(mean - pmf_mean) < 3.0 * se);
}

TEST_CASE("discounted terminal price is a martingale") {
  const int M = 100000;
  for (const RiskNeutralModel& m : {make({0.0, {3.0}, {0.0}}), make(hawkes_params())}) {
    const std::vector<TerminalSample> s = simulate_terminal_batch(m, 0.25, M, 707);
    double sum = 0.0, sq = 0.0;
    const double df = std::exp(-0.05 * 0.25);
    for (const TerminalSample& t : s) {
      sum += df * t.S_T;
      sq += df * df * t.S_T * t.S_T;
    }
    const double mean = sum / M, se = std::sqrt((sq / M - mean * mean) / M);
    CHECK(std::abs(mean - 100.0) < 3.0 * se);
  }
}

TEST_CASE("mean-one jumps without diffusion carry no compensator drift") {
  RiskNeutralModel m = make(hawkes_params(), 0.0);
  m.jump_Q = JumpSpec::normal(-0.5 * 0.45 * 0.45, 0.45, Measure::Q);
  const std::vector<TerminalSample> s = simulate_terminal_batch(m, 0.5, 2000, 808);
  int empty = 0;
  for (const TerminalSample& t : s) {
    CHECK(t.compensator > 0.0);
    if (t.N_T == 0) {
      ++empty;
      CHECK(t.S_T == doctest::Approx(100.0 * std::exp(0.05 * 0.5)).epsilon(1e-14));
    }
  }
  CHECK(empty > 0);
}

TEST_CASE("Monte Carlo price brackets the published value") {
  const RiskNeutralModel m = make(hawkes_params());
  const McResult r = mc_price(100.0, 0.25, m, 100000, 20240101, Payoff::Call, true);
  CHECK(r.n_paths == 100000);
  CHECK(r.cv_used);
  CHECK(r.ci_lo <= r.estimate);
  CHECK(r.estimate <= r.ci_hi);
  CHECK(r.ci_hi - r.estimate == doctest::Approx(1.96 * r.std_error).epsilon(1e-12));
  CHECK(r.ci_lo <= 14.9706);
  CHECK(14.9706 <= r.ci_hi);
}

TEST_CASE("Monte Carlo determinism") {
  const RiskNeutralModel m = make(carma21_params());
  const McResult a = mc_price(95.0, 0.5, m, 2000, 42, Payoff::Put, true);
  const McResult b = mc_price(95.0, 0.5, m, 2000, 42, Payoff::Put, true);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.cv_beta == b.cv_beta);
  CHECK(a.seed == 42);
  const McResult c = mc_price(95.0, 0.5, m, 2000, 43, Payoff::Put, true);
  CHECK(a.estimate != c.estimate);

  const std::vector<TerminalSample> one = simulate_terminal_batch(m, 0.5, 500, 42, 1);
  const std::vector<TerminalSample> three = simulate_terminal_batch(m, 0.5, 500, 42, 3);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].S_T == three[i].S_T);
    CHECK(one[i].N_T == three[i].N_T);
  }
  CHECK_THROWS_AS(mc_price(95.0, 0.5, m, 99, 42, Payoff::Put, true), ValidationError);
}

TEST_CASE("control variate reduces the standard error") {
  for (const CarmaHawkesParams& p : {hawkes_params(), carma21_params(), carma31_params()}) {
    const RiskNeutralModel m = make(p);
    for (double K : {80.0, 100.0, 120.0}) {
      const McResult cv = mc_price(K, 1.0, m, 10000, 99, Payoff::Call, true);
      const McResult plain = mc_price(K, 1.0, m, 10000, 99, Payoff::Call, false);
      CHECK_FALSE(plain.cv_used);
      CHECK(cv.std_error <= plain.std_error);
      const McResult unit = mc_price(K, 1.0, m, 10000, 99, Payoff::Call, true, BetaMode::Unit);
      CHECK(unit.cv_beta == 1.0);
    }
  }
}
