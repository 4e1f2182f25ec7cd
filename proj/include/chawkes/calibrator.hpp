#pragma once

// RRMSE calibration of (mu, b, a, mu_J, sigma_J, sigma) to implied volatilities.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "chawkes/fourier_pricer.hpp"

namespace chawkes {

enum class ObservableType { Price, Iv };

struct MarketQuote {
  double strike = 0.0;
  double maturity = 0.0;
  ObservableType observable_type = ObservableType::Iv;
  double observable = 0.0;
  bool is_call = true;
  std::optional<long> volume;
  std::optional<long> open_interest;
};

/// Keeps quotes whose volume and open interest (when present) are >= 10.
std::vector<MarketQuote> liquidity_filter(const std::vector<MarketQuote>& quotes, long min_count = 10);

struct PricingSettings {
  int m = 450;
  int n_steps = 2000;
  double r = 0.0;
  double S0 = 100.0;
  StateVector X0;
  double t0 = 0.0;
};

/// Layout of the parameter vector: mu, b_0..b_q, a_1..a_p, mu_J, sigma_J, sigma.
struct PsiLayout {
  std::size_t p = 1;
  std::size_t q = 0;

  std::size_t size() const { return p + q + 5; }
  std::vector<std::string> names() const;
  RiskNeutralModel to_model(const RVec& psi, const PricingSettings& s) const;
  RVec from_model(const RiskNeutralModel& model) const;
};

struct ObjectiveReport {
  double value = 0.0;  // +inf when infeasible or nothing priced
  std::size_t used = 0;
  std::vector<std::size_t> skipped;  // indices into the quote vector
  std::string feasibility;           // empty when feasible
};

/// Feasibility: model validates, sigma_J > 0, sigma > 0, parameters finite.
std::string feasibility_report(const PsiLayout& layout, const RVec& psi, const PricingSettings& s);

ObjectiveReport rrmse(const RVec& psi, const PsiLayout& layout, const std::vector<MarketQuote>& quotes,
                      const PricingSettings& settings, const QuadRule& rule);

/// Market implied vol of one quote; nullopt when it cannot be inverted.
std::optional<double> market_iv(const MarketQuote& q, const PricingSettings& s);

struct CalibConfig {
  PsiLayout layout;
  RVec initial;
  RVec lower;  // empty selects default_bounds
  RVec upper;
  int max_evaluations = 2000;  // per restart
  int restarts = 3;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  PricingSettings pricing;
};

void default_bounds(const PsiLayout& layout, RVec& lower, RVec& upper);

struct RestartTrace {
  RVec start;
  RVec best;
  double best_value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  RVec trace;  // best objective after each simplex iteration
};

struct CalibResult {
  RVec psi_star;
  double objective = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<RestartTrace> restarts;
  std::vector<std::size_t> skipped;
  std::size_t used = 0;
};

using EvalObserver = std::function<void(const RVec& psi, double value)>;

/// Nelder-Mead with box clipping and +inf for infeasible points; restarts after
/// the first perturb the best point so far.
CalibResult calibrate(const std::vector<MarketQuote>& quotes, const CalibConfig& config,
                      const EvalObserver& observer = {});

}  // namespace chawkes
