#include "chawkes/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "chawkes/black_scholes.hpp"
#include "chawkes/config.hpp"
#include "chawkes/errors.hpp"
#include "chawkes/fourier_pricer.hpp"
#include "chawkes/path_simulator.hpp"
#include "chawkes/toy_model.hpp"

namespace chawkes {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RVec make_range(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from) || !std::isfinite(from) || !std::isfinite(to))
    throw UsageError("empty range: need from <= to and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  RVec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = from + static_cast<double>(i) * step;
  return v;
}

RVec parse_list(const std::string& spec) {
  RVec out;
  std::istringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || cell.find_first_not_of(" \t", pos) != std::string::npos)
      throw UsageError("not a number in list: '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

RVec parse_grid(const std::string& spec) {
  double a = 0, b = 0, c = 0;
  char s1 = 0, s2 = 0;
  std::istringstream ss(spec);
  if (!(ss >> a >> s1 >> b >> s2 >> c) || s1 != ':' || s2 != ':')
    throw UsageError("strike grid must look like from:to:step, got '" + spec + "'");
  return make_range(a, b, c);
}

// Output sink: a file when a path is given, otherwise the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ValidationError("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string full_precision(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string iv_cell(double price, const RiskNeutralModel& model, double K, double T, bool is_call) {
  try {
    return full_precision(implied_vol(price, model.S0, K, model.r, T - model.t0, is_call));
  } catch (const std::exception&) {
    return "";
  }
}

void set_parameter(RunConfig& c, const std::string& name, double value) {
  ModelSection& m = c.model;
  auto indexed = [&](const std::string& prefix, RVec& v, std::size_t base) -> bool {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return false;
    const std::string digits = name.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos) return false;
    const std::size_t idx = std::stoul(digits) - base;
    if (idx >= v.size()) throw UsageError("parameter '" + name + "' does not exist for this model");
    v[idx] = value;
    return true;
  };
  if (name == "mu") m.hawkes.mu = value;
  else if (name == "mu_J") m.jump.mu_J = value;
  else if (name == "sigma_J") m.jump.sigma_J = value;
  else if (name == "sigma") m.sigma = value;
  else if (name == "r") m.r = value;
  else if (name == "S0") m.S0 = value;
  else if (indexed("a", m.hawkes.a, 1) || indexed("b", m.hawkes.b_raw, 0)) return;
  else throw UsageError("unknown parameter '" + name + "'");
  if ((name == "mu_J" || name == "sigma_J") && m.jump.family != JumpFamily::Normal)
    throw UsageError("'" + name + "' applies to normal jumps only");
}

void print_mc(std::ostream& out, const char* label, const McResult& r) {
  out << label << " " << r.estimate << "  se " << r.std_error << "  ci95 [" << r.ci_lo << ", " << r.ci_hi
      << "]  paths " << r.n_paths << "  seed " << r.seed << "  beta " << r.cv_beta << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CARMA(p,q)-Hawkes jump-diffusion option pricing"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "override numerics.seed");

  double strike = 0.0, maturity = 0.0;
  std::size_t paths = 0;
  bool mc = false;
  std::string out_path;

  auto* price = app.add_subcommand("price", "call and put by Gauss-Laguerre quadrature");
  price->add_option("--strike", strike)->required();
  price->add_option("--maturity", maturity)->required();
  price->add_flag("--mc", mc, "add a Monte Carlo cross-check");
  auto* price_paths = price->add_option("--paths", paths);

  double from = 0.0, to = 0.0, step = 0.0;
  std::string maturity_list;
  auto* surface = app.add_subcommand("surface", "price grid as CSV (strike,maturity,call,put,iv)");
  surface->add_option("--from", from)->required();
  surface->add_option("--to", to)->required();
  surface->add_option("--step", step)->required();
  surface->add_option("--maturity", maturity_list, "comma separated")->required();
  surface->add_option("--out", out_path);

  std::string param, strike_grid;
  double sens_maturity = 1.0;
  auto* sensitivity = app.add_subcommand("sensitivity", "implied-vol sweep over one parameter");
  sensitivity->add_option("--param", param)->required();
  sensitivity->add_option("--from", from)->required();
  sensitivity->add_option("--to", to)->required();
  sensitivity->add_option("--step", step)->required();
  sensitivity->add_option("--maturity", sens_maturity);
  auto* sens_strike = sensitivity->add_option("--strike", strike, "single strike (default: at the money)");
  sensitivity->add_option("--strike-grid", strike_grid, "from:to:step strike sweep")->excludes(sens_strike);
  sensitivity->add_option("--out", out_path);

  std::string dump_path;
  auto* simulate = app.add_subcommand("simulate", "terminal samples under Q as CSV");
  simulate->add_option("--maturity", maturity)->required();
  auto* sim_paths = simulate->add_option("--paths", paths);
  simulate->add_option("--out", out_path);
  simulate->add_option("--path-dump", dump_path, "event times of path 0 (event_index,time)");

  int n_max = -1;
  auto* pmf = app.add_subcommand("pmf", "counting probabilities of N_T - N_t0");
  pmf->add_option("--maturity", maturity)->required();
  pmf->add_option("--n-max", n_max);
  pmf->add_option("--out", out_path);

  std::string quotes_path, smile_path;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "RRMSE calibration to a quote CSV");
  calibrate_cmd->add_option("--quotes", quotes_path)->required()->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--out", out_path, "report JSON");
  calibrate_cmd->add_option("--smile-out", smile_path, "fitted smile CSV");

  auto* show = app.add_subcommand("show-config", "print the effective configuration");
  show->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (*seed_opt) cfg.numerics.seed = seed;
    const NumericsSection& num = cfg.numerics;
    out << std::fixed << std::setprecision(4);

    if (*price) {
      const RiskNeutralModel model = build_model(cfg);
      const QuadRule rule = gauss_laguerre(num.m);
      const MaturitySlice slice(model, maturity, rule, num.n_steps, num.scheme);
      const double call = slice.call(strike);
      const double put = slice.put(strike);
      out << "call " << call << "\nput " << put << "\n";
      if (mc) {
        const std::size_t M = *price_paths ? paths : num.mc_paths;
        std::optional<double> fwd;
        if (num.control_variate) fwd = forward_price(model, maturity, num.n_steps, num.scheme);
        const auto samples = simulate_terminal_batch(model, maturity, M, num.seed);
        print_mc(out, "mc_call",
                 mc_price_from_samples(samples, strike, maturity, model, num.seed, Payoff::Call,
                                       num.control_variate, fwd, num.cv_beta));
        print_mc(out, "mc_put",
                 mc_price_from_samples(samples, strike, maturity, model, num.seed, Payoff::Put,
                                       num.control_variate, fwd, num.cv_beta));
      }
    } else if (*surface) {
      const RVec maturities = parse_list(maturity_list);
      if (maturities.empty()) throw UsageError("empty maturity list");
      const RVec strikes = make_range(from, to, step);
      const RiskNeutralModel model = build_model(cfg);
      const QuadRule rule = gauss_laguerre(num.m);
      const PriceSurface s = price_surface(strikes, maturities, model, rule, num.n_steps, num.scheme);
      Sink sink(out_path, out);
      std::ostream& o = *sink;
      o << std::setprecision(17) << std::defaultfloat << "strike,maturity,call,put,iv\n";
      for (std::size_t t = 0; t < maturities.size(); ++t)
        for (std::size_t k = 0; k < strikes.size(); ++k)
          o << strikes[k] << "," << maturities[t] << "," << s.calls[t][k] << "," << s.puts[t][k] << ","
            << iv_cell(s.calls[t][k], model, strikes[k], maturities[t], true) << "\n";
    } else if (*sensitivity) {
      const RVec values = make_range(from, to, step);
      const QuadRule rule = gauss_laguerre(num.m);
      Sink sink(out_path, out);
      std::ostream& o = *sink;
      o << std::setprecision(17) << std::defaultfloat << "param,value,strike,maturity,call,iv,status\n";
      for (double v : values) {
        RunConfig c = cfg;
        set_parameter(c, param, v);
        RVec strikes;
        if (!strike_grid.empty()) strikes = parse_grid(strike_grid);
        else strikes = {*sens_strike ? strike : c.model.S0};
        try {
          const RiskNeutralModel model = build_model(c);
          const MaturitySlice slice(model, sens_maturity, rule, num.n_steps, num.scheme);
          for (double K : strikes) {
            const double call = slice.call(K);
            o << param << "," << v << "," << K << "," << sens_maturity << "," << call << ","
              << iv_cell(call, model, K, sens_maturity, true) << ",ok\n";
          }
        } catch (const ValidationError& ex) {
          for (double K : strikes) o << param << "," << v << "," << K << "," << sens_maturity << ",,,infeasible\n";
        }
      }
    } else if (*simulate) {
      const RiskNeutralModel model = build_model(cfg);
      const std::size_t M = *sim_paths ? paths : num.mc_paths;
      const auto samples = simulate_terminal_batch(model, maturity, M, num.seed);
      if (!dump_path.empty()) {
        Sink dump(dump_path, out);
        SplitMix64 rng = path_stream(num.seed, 0);
        const ArrivalRecord rec = simulate_arrivals(CarmaHawkes(model.hawkes), maturity, rng, model.t0,
                                                    model.initial_state());
        *dump << std::setprecision(17) << "event_index,time\n";
        for (std::size_t i = 0; i < rec.times.size(); ++i) *dump << i + 1 << "," << rec.times[i] << "\n";
      }
      const double disc = std::exp(-model.r * (maturity - model.t0));
      double mean = 0.0, sq = 0.0, mean_n = 0.0;
      for (const TerminalSample& s : samples) {
        mean += disc * s.S_T;
        sq += disc * s.S_T * disc * s.S_T;
        mean_n += s.N_T;
      }
      const double n = static_cast<double>(M);
      mean /= n;
      mean_n /= n;
      const double se = std::sqrt(std::max(0.0, sq / n - mean * mean) / (n - 1.0));
      if (!out_path.empty()) {
        Sink sink(out_path, out);
        *sink << std::setprecision(17) << "path_index,S_T,N_T,compensator\n";
        for (std::size_t i = 0; i < M; ++i)
          *sink << i << "," << samples[i].S_T << "," << samples[i].N_T << "," << samples[i].compensator << "\n";
      }
      out << "paths " << M << "\nseed " << num.seed << "\ndiscounted_mean " << mean << "\nstd_error " << se
          << "\nS0 " << model.S0 << "\nmean_N_T " << mean_n << "\n";
    } else if (*pmf) {
      const RiskNeutralModel model = build_model(cfg);
      const int nm = n_max >= 0 ? n_max : num.pmf_n_max;
      const CountingPmf p =
          counting_pmf(model.hawkes, model.t0, maturity, model.initial_state(), nm, 0, num.n_steps, 1.0, num.scheme);
      Sink sink(out_path, out);
      *sink << std::setprecision(17) << std::defaultfloat << "n,probability\n";
      for (int k = 0; k <= p.n_max; ++k) *sink << k << "," << p.probs[k] << "\n";
      if (p.mass_deficit > num.series_eps)
        err << "warning: mass beyond n_max = " << p.n_max << " is " << p.mass_deficit << "; raise --n-max\n";
      if (sink.to_file()) out << std::scientific << "mass_deficit " << p.mass_deficit << "\n";
    } else if (*calibrate_cmd) {
      const std::vector<MarketQuote> all = load_quotes_csv(quotes_path);
      const std::vector<MarketQuote> quotes = liquidity_filter(all, cfg.calibration.min_liquidity);
      if (quotes.empty()) throw ValidationError("no quotes left after the liquidity filter");
      CalibConfig cc;
      cc.layout = layout_of(cfg.model);
      cc.initial = cc.layout.from_model(build_model(cfg));
      cc.lower = cfg.calibration.lower;
      cc.upper = cfg.calibration.upper;
      cc.max_evaluations = cfg.calibration.max_evaluations;
      cc.restarts = cfg.calibration.restarts;
      cc.tolerance = cfg.calibration.tolerance;
      cc.seed = *seed_opt ? seed : cfg.calibration.seed;
      cc.pricing = pricing_settings(cfg);
      const CalibResult res = calibrate(quotes, cc);

      nlohmann::json rep;
      const auto names = cc.layout.names();
      for (std::size_t i = 0; i < names.size(); ++i) rep["parameters"][names[i]] = res.psi_star[i];
      rep["psi"] = res.psi_star;
      rep["rrmse"] = res.objective;
      rep["evaluations"] = res.evaluations;
      rep["iterations"] = res.iterations;
      rep["converged"] = res.converged;
      rep["quotes_used"] = res.used;
      rep["quotes_filtered"] = all.size() - quotes.size();
      rep["skipped"] = nlohmann::json::array();
      for (std::size_t i : res.skipped)
        rep["skipped"].push_back({{"index", i}, {"strike", quotes[i].strike}, {"maturity", quotes[i].maturity}});
      rep["restarts"] = nlohmann::json::array();
      for (const RestartTrace& t : res.restarts)
        rep["restarts"].push_back({{"start", t.start},
                                   {"best", t.best},
                                   {"best_value", t.best_value},
                                   {"evaluations", t.evaluations},
                                   {"iterations", t.iterations},
                                   {"converged", t.converged},
                                   {"trace", t.trace}});
      Sink sink(out_path, out);
      *sink << rep.dump(2) << "\n";

      if (!smile_path.empty()) {
        const RiskNeutralModel fitted = cc.layout.to_model(res.psi_star, cc.pricing);
        const QuadRule rule = gauss_laguerre(num.m);
        Sink smile(smile_path, out);
        *smile << std::setprecision(17) << "strike,maturity,option_type,market_iv,model_iv\n";
        for (const MarketQuote& q : quotes) {
          const MaturitySlice slice(fitted, q.maturity, rule, num.n_steps, num.scheme);
          const double p = q.is_call ? slice.call(q.strike) : slice.put(q.strike);
          const std::optional<double> miv = market_iv(q, cc.pricing);
          *smile << q.strike << "," << q.maturity << "," << (q.is_call ? "call" : "put") << ","
                 << (miv ? full_precision(*miv) : "") << "," << iv_cell(p, fitted, q.strike, q.maturity, q.is_call)
                 << "\n";
        }
      }
    } else if (*show) {
      Sink sink(out_path, out);
      *sink << to_json(cfg).dump(2) << "\n";
    }
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& ex) {
    err << "validation error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& ex) {
    err << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace chawkes
