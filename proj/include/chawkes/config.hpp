#pragma once

// JSON run configuration and quote CSV ingestion for the command-line front end.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "chawkes/calibrator.hpp"
#include "chawkes/charfn_engine.hpp"
#include "chawkes/path_simulator.hpp"

namespace chawkes {

struct ModelSection {
  std::string family = "generic";  // hawkes, carma21, carma31, carma32 or generic
  CarmaHawkesParams hawkes;
  JumpSpec jump;                // as written; tilted to Q when measure is P
  std::optional<double> phi;    // required with a P-measure jump law
  double sigma = 0.0;
  double r = 0.0;
  double S0 = 100.0;
  StateVector X0;
  double t0 = 0.0;
};

struct NumericsSection {
  int m = 450;
  int n_steps = 2000;
  OdeScheme scheme = OdeScheme::Euler;
  std::size_t mc_paths = 1000000;
  std::uint64_t seed = 20240101;
  int pmf_n_max = 64;
  double series_eps = 1e-8;
  bool control_variate = true;
  BetaMode cv_beta = BetaMode::Pilot;
};

struct CalibrationSection {
  int max_evaluations = 2000;  // per restart
  int restarts = 3;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  long min_liquidity = 10;
  RVec lower;  // empty selects the default box
  RVec upper;
};

struct RunConfig {
  ModelSection model;
  NumericsSection numerics;
  CalibrationSection calibration;
};

/// Throws ValidationError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Effective configuration with every default spelled out.
nlohmann::json to_json(const RunConfig& c);

/// Q-measure model; P-measure jump laws are tilted with the configured phi.
RiskNeutralModel build_model(const RunConfig& c);

PsiLayout layout_of(const ModelSection& m);
PricingSettings pricing_settings(const RunConfig& c);

/// Header: strike,maturity,observable_type,observable,option_type[,volume,open_interest].
/// Errors name the source and the 1-based line number.
std::vector<MarketQuote> read_quotes_csv(std::istream& in, const std::string& source = "quotes");
std::vector<MarketQuote> load_quotes_csv(const std::string& path);

}  // namespace chawkes
