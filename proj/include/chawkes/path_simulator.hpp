#pragma once

// Thinning simulation of CARMA-Hawkes arrivals, closed-form compensator,
// terminal prices under Q and a control-variate Monte Carlo pricer.

#include <cstdint>
#include <functional>
#include <optional>

#include "chawkes/charfn_engine.hpp"
#include "chawkes/rng.hpp"

namespace chawkes {

struct ThinningBound {
  double c = 0.0;      // ||b^T S||_2 ||S^{-1} e||_2
  double decay = 0.0;  // max Re(lambda)
};

ThinningBound bound_coeff(const CarmaHawkes& model);

struct ArrivalRecord {
  RVec times;  // increasing, inside (t0, T]
  int N_T = 0;
  StateVector X_T;
};

struct Candidate {
  double time;
  double intensity;  // lambda_t just before the candidate
  double bound;      // mu + c g
  double rate;       // proposal rate mu + c g + c in force when drawn
  bool accepted;
};

using CandidateObserver = std::function<void(const Candidate&)>;

/// Thinning with a decaying scalar bound. X0 is the state at t0 including any
/// event at t0 (empty means zero); when X0 is zero the first arrival is
/// exponential with rate mu. Throws NumericalError on non-finite intensity.
ArrivalRecord simulate_arrivals(const CarmaHawkes& model, double T, SplitMix64& rng, double t0 = 0.0,
                                const StateVector& X0 = {}, const CandidateObserver& observer = {});

/// Integral of lambda over [t0, T] for arrivals in (t0, T]; X_t0 empty means zero.
double integrated_intensity(const ArrivalRecord& record, const CarmaHawkes& model, double T, double t0 = 0.0,
                            const StateVector& X_t0 = {});

struct TerminalSample {
  double S_T;
  int N_T;
  double compensator;
};

TerminalSample simulate_terminal(const RiskNeutralModel& model, const CarmaHawkes& hawkes, double T,
                                 SplitMix64& rng);
TerminalSample simulate_terminal(const RiskNeutralModel& model, double T, SplitMix64& rng);

/// Path i uses path_stream(seed, i).
std::vector<TerminalSample> simulate_terminal_batch(const RiskNeutralModel& model, double T, std::size_t M,
                                                    std::uint64_t seed, unsigned workers = 0);

enum class Payoff { Call, Put };
enum class BetaMode { Pilot, Unit };

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  double cv_beta = 0.0;
  bool cv_used = false;
};

inline constexpr double kPilotFraction = 0.05;

/// Control variate e^{-r tau} S_T with known mean e^{-r tau} forward. Pilot
/// beta is cov/var over the first 5% of samples.
McResult mc_price_from_samples(const std::vector<TerminalSample>& samples, double K, double T,
                               const RiskNeutralModel& model, std::uint64_t seed, Payoff payoff, bool use_cv,
                               std::optional<double> forward, BetaMode beta_mode = BetaMode::Pilot);

McResult mc_price(double K, double T, const RiskNeutralModel& model, std::size_t M, std::uint64_t seed,
                  Payoff payoff, bool use_cv, BetaMode beta_mode = BetaMode::Pilot, int n_steps = 2000);

}  // namespace chawkes
