#include "chawkes/path_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include "chawkes/errors.hpp"
#include "chawkes/parallel.hpp"

namespace chawkes {

ThinningBound bound_coeff(const CarmaHawkes& model) {
  const CompanionSystem& sys = model.system();
  return {euclidean_norm(sys.bS()) * euclidean_norm(sys.Sinv_e()), sys.max_real_eigenvalue()};
}

namespace {

double exponential(SplitMix64& rng, double rate) {
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log(rng.uniform()) / rate;
}

bool all_zero(const StateVector& x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

ArrivalRecord simulate_arrivals(const CarmaHawkes& model, double T, SplitMix64& rng, double t0, const StateVector& X0,
                                const CandidateObserver& observer) {
  const CompanionSystem& sys = model.system();
  const std::size_t p = sys.dim();
  if (!X0.empty() && X0.size() != p) throw ValidationError("simulate_arrivals: X0 length must equal p");
  const ThinningBound bound = bound_coeff(model);
  const double mu = model.mu();
  const CVec& lambda = sys.eigenvalues();
  const CVec& jump = sys.Sinv_e();
  const CVec& bS = sys.bS();

  const bool zero_start = X0.empty() || all_zero(X0);
  CVec z = zero_start ? CVec(p, cplx{}) : sys.to_modal(X0);
  // c g bounds |b^T S z| as long as ||z|| <= g ||S^{-1} e||.
  double g = zero_start ? 0.0 : euclidean_norm(z) / euclidean_norm(jump);

  auto advance = [&](double dt) {
    for (std::size_t i = 0; i < p; ++i) z[i] *= std::exp(lambda[i] * dt);
    g *= std::exp(bound.decay * dt);
  };
  auto intensity = [&] {
    double acc = mu;
    for (std::size_t i = 0; i < p; ++i) acc += (bS[i] * z[i]).real();
    return acc;
  };
  auto accept = [&](ArrivalRecord& rec, double t) {
    for (std::size_t i = 0; i < p; ++i) z[i] += jump[i];
    g += 1.0;
    rec.times.push_back(t);
  };

  ArrivalRecord rec;
  double t = t0;
  bool active = true;
  if (zero_start) {
    const double first = t + exponential(rng, mu);
    if (first <= T) {
      t = first;
      accept(rec, t);
    } else {
      active = false;
    }
  }
  while (active) {
    const double rate = mu + bound.c * g + bound.c;
    const double dt = exponential(rng, rate);
    if (!(t + dt <= T)) break;
    advance(dt);
    t += dt;
    const double lam = intensity();
    if (!std::isfinite(lam)) throw NumericalError("simulate_arrivals: non-finite intensity");
    const bool accepted = rng.uniform() * rate <= lam;
    if (observer) observer(Candidate{t, lam, mu + bound.c * g, rate, accepted});
    if (accepted) accept(rec, t);
  }
  advance(T - t);
  rec.N_T = static_cast<int>(rec.times.size());
  rec.X_T.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) acc += sys.S()(i, j) * z[j];
    rec.X_T[i] = acc.real();
  }
  return rec;
}

double integrated_intensity(const ArrivalRecord& record, const CarmaHawkes& model, double T, double t0,
                            const StateVector& X_t0) {
  const CompanionSystem& sys = model.system();
  const std::size_t p = sys.dim();
  const double tau = T - t0;
  if (!(tau >= 0.0)) throw ValidationError("integrated_intensity: T < t0");
  double prev = t0;
  for (double ti : record.times) {
    if (!(ti > prev) || ti > T) throw ValidationError("integrated_intensity: times must increase inside (t0, T]");
    prev = ti;
  }
  const CVec& lambda = sys.eigenvalues();
  const CVec& Sinv_e = sys.Sinv_e();
  const CVec& bS = sys.bS();
  const CVec z0 = X_t0.empty() ? CVec(p, cplx{}) : sys.to_modal(X_t0);
  const std::size_t k = record.times.size();

  // S(k) = e^{A dT} S(k-1) + I is diagonal in modal coordinates: S(k) = S diag(s) S^{-1}.
  CVec s(p, cplx{});
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < p; ++i) {
      s[i] = j == 0 ? cplx(1.0) : std::exp(lambda[i] * (record.times[j] - record.times[j - 1])) * s[i] + 1.0;
    }
  }
  const double tk = k == 0 ? T : record.times.back();

  // b^T A^{-1} S = (b^T S)_i / lambda_i.
  cplx acc = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const cplx row = bS[i] / lambda[i];
    cplx term = (std::exp(lambda[i] * tau) - 1.0) * z0[i] - Sinv_e[i] * static_cast<double>(k);
    if (k > 0) term += s[i] * std::exp(lambda[i] * (T - tk)) * Sinv_e[i];
    acc += row * term;
  }
  return model.mu() * tau + acc.real();
}

TerminalSample simulate_terminal(const RiskNeutralModel& model, const CarmaHawkes& hawkes, double T,
                                 SplitMix64& rng) {
  const double tau = T - model.t0;
  const StateVector X0 = model.initial_state();
  const ArrivalRecord rec = simulate_arrivals(hawkes, T, rng, model.t0, X0);
  const double comp = integrated_intensity(rec, hawkes, T, model.t0, X0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double Z = normal(rng);

  const JumpSpec& J = model.jump_Q;
  double jumps = 0.0;
  if (J.family == JumpFamily::Normal) {
    for (int n = 0; n < rec.N_T; ++n) jumps += J.mu_J + J.sigma_J * normal(rng);
  } else {
    std::gamma_distribution<double> gamma(J.alpha, 1.0 / J.beta);
    for (int n = 0; n < rec.N_T; ++n) jumps += gamma(rng) + J.shift;
  }
  const double k = exp_moment(J) - 1.0;
  const double s = model.sigma;
  const double log_st = std::log(model.S0) + (model.r - 0.5 * s * s) * tau + s * std::sqrt(tau) * Z - k * comp + jumps;
  return {std::exp(log_st), rec.N_T, comp};
}

TerminalSample simulate_terminal(const RiskNeutralModel& model, double T, SplitMix64& rng) {
  const CarmaHawkes hawkes(model.hawkes);
  return simulate_terminal(model, hawkes, T, rng);
}

std::vector<TerminalSample> simulate_terminal_batch(const RiskNeutralModel& model, double T, std::size_t M,
                                                    std::uint64_t seed, unsigned workers) {
  model.check();
  if (!(T > model.t0)) throw ValidationError("maturity must exceed t0");
  const CarmaHawkes hawkes(model.hawkes);
  std::vector<TerminalSample> out(M);
  parallel_for(
      M,
      [&](std::size_t i) {
        SplitMix64 rng = path_stream(seed, i);
        out[i] = simulate_terminal(model, hawkes, T, rng);
      },
      workers);
  return out;
}

McResult mc_price_from_samples(const std::vector<TerminalSample>& samples, double K, double T,
                               const RiskNeutralModel& model, std::uint64_t seed, Payoff payoff, bool use_cv,
                               std::optional<double> forward, BetaMode beta_mode) {
  const std::size_t M = samples.size();
  if (M < 2) throw ValidationError("mc_price: need at least 2 paths");
  const double disc = std::exp(-model.r * (T - model.t0));
  RVec y(M), c(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double st = samples[i].S_T;
    y[i] = disc * (payoff == Payoff::Call ? std::max(st - K, 0.0) : std::max(K - st, 0.0));
    c[i] = disc * st;
  }

  McResult res;
  res.n_paths = M;
  res.seed = seed;
  res.cv_used = use_cv && forward.has_value();
  if (res.cv_used) {
    if (beta_mode == BetaMode::Unit) {
      res.cv_beta = 1.0;
    } else {
      const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(kPilotFraction * M)));
      double my = 0.0, mc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        my += y[i];
        mc += c[i];
      }
      my /= n;
      mc /= n;
      double cov = 0.0, var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cov += (y[i] - my) * (c[i] - mc);
        var += (c[i] - mc) * (c[i] - mc);
      }
      res.cv_beta = var > 0.0 ? cov / var : 0.0;
    }
    const double mean_c = disc * *forward;
    for (std::size_t i = 0; i < M; ++i) y[i] -= res.cv_beta * (c[i] - mean_c);
  }

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(M);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  res.estimate = mean;
  res.std_error = std::sqrt(ss / static_cast<double>(M - 1) / static_cast<double>(M));
  res.ci_lo = mean - 1.96 * res.std_error;
  res.ci_hi = mean + 1.96 * res.std_error;
  return res;
}

McResult mc_price(double K, double T, const RiskNeutralModel& model, std::size_t M, std::uint64_t seed,
                  Payoff payoff, bool use_cv, BetaMode beta_mode, int n_steps) {
  if (M < 100) throw ValidationError("mc_price: need at least 100 paths");
  std::optional<double> fwd;
  if (use_cv) {
    try {
      fwd = forward_price(model, T, n_steps);
    } catch (const NumericalError& ex) {
      std::cerr << "warning: control variate disabled: " << ex.what() << "\n";
    }
  }
  const auto samples = simulate_terminal_batch(model, T, M, seed);
  return mc_price_from_samples(samples, K, T, model, seed, payoff, use_cv, fwd, beta_mode);
}

}  // namespace chawkes
