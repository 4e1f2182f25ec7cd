#include "chawkes/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "chawkes/black_scholes.hpp"
#include "chawkes/errors.hpp"
#include "chawkes/rng.hpp"

namespace chawkes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOpenLower = 1e-8;
}  // namespace

std::vector<MarketQuote> liquidity_filter(const std::vector<MarketQuote>& quotes, long min_count) {
  std::vector<MarketQuote> out;
  for (const MarketQuote& q : quotes) {
    if (q.volume && *q.volume < min_count) continue;
    if (q.open_interest && *q.open_interest < min_count) continue;
    out.push_back(q);
  }
  return out;
}

std::vector<std::string> PsiLayout::names() const {
  std::vector<std::string> n{"mu"};
  for (std::size_t i = 0; i <= q; ++i) n.push_back("b" + std::to_string(i));
  for (std::size_t i = 1; i <= p; ++i) n.push_back("a" + std::to_string(i));
  n.insert(n.end(), {"mu_J", "sigma_J", "sigma"});
  return n;
}

RiskNeutralModel PsiLayout::to_model(const RVec& psi, const PricingSettings& s) const {
  if (psi.size() != size()) throw ValidationError("parameter vector has the wrong length");
  RiskNeutralModel m;
  m.hawkes.mu = psi[0];
  m.hawkes.b_raw.assign(psi.begin() + 1, psi.begin() + 2 + q);
  m.hawkes.a.assign(psi.begin() + 2 + q, psi.begin() + 2 + q + p);
  const std::size_t j = 2 + q + p;
  m.jump_Q.family = JumpFamily::Normal;
  m.jump_Q.measure = Measure::Q;
  m.jump_Q.mu_J = psi[j];
  m.jump_Q.sigma_J = psi[j + 1];
  m.sigma = psi[j + 2];
  m.r = s.r;
  m.S0 = s.S0;
  m.X0 = s.X0;
  m.t0 = s.t0;
  return m;
}

RVec PsiLayout::from_model(const RiskNeutralModel& model) const {
  if (model.hawkes.p() != p || model.hawkes.b_raw.size() != q + 1)
    throw ValidationError("model orders do not match the parameter layout");
  if (model.jump_Q.family != JumpFamily::Normal) throw ValidationError("calibration supports normal jumps only");
  RVec psi{model.hawkes.mu};
  psi.insert(psi.end(), model.hawkes.b_raw.begin(), model.hawkes.b_raw.end());
  psi.insert(psi.end(), model.hawkes.a.begin(), model.hawkes.a.end());
  psi.insert(psi.end(), {model.jump_Q.mu_J, model.jump_Q.sigma_J, model.sigma});
  return psi;
}

std::string feasibility_report(const PsiLayout& layout, const RVec& psi, const PricingSettings& s) {
  if (psi.size() != layout.size()) return "parameter vector has the wrong length";
  for (double v : psi)
    if (!std::isfinite(v)) return "non-finite parameter";
  const RiskNeutralModel m = layout.to_model(psi, s);
  if (!(m.hawkes.mu > 0.0)) return "mu must be > 0";
  if (!(m.jump_Q.sigma_J > 0.0)) return "sigma_J must be > 0";
  if (!(m.sigma > 0.0)) return "sigma must be > 0";
  const Diagnostics d = validate(m.hawkes);
  if (!d.pass) return d.message;
  return {};
}

std::optional<double> market_iv(const MarketQuote& q, const PricingSettings& s) {
  if (q.observable_type == ObservableType::Iv) {
    if (q.observable > 0.0 && std::isfinite(q.observable)) return q.observable;
    return std::nullopt;
  }
  try {
    return implied_vol(q.observable, s.S0, q.strike, s.r, q.maturity - s.t0, q.is_call);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

ObjectiveReport rrmse(const RVec& psi, const PsiLayout& layout, const std::vector<MarketQuote>& quotes,
                      const PricingSettings& settings, const QuadRule& rule) {
  if (quotes.empty()) throw ValidationError("rrmse: no quotes");
  ObjectiveReport rep;
  rep.feasibility = feasibility_report(layout, psi, settings);
  if (!rep.feasibility.empty()) {
    rep.value = kInf;
    return rep;
  }
  const RiskNeutralModel model = layout.to_model(psi, settings);

  std::map<double, std::vector<std::size_t>> by_maturity;
  for (std::size_t i = 0; i < quotes.size(); ++i) by_maturity[quotes[i].maturity].push_back(i);

  double ss = 0.0;
  for (const auto& [T, idx] : by_maturity) {
    std::optional<MaturitySlice> slice;
    try {
      slice.emplace(model, T, rule, settings.n_steps);
    } catch (const std::exception& ex) {
      rep.feasibility = ex.what();
      rep.value = kInf;
      return rep;
    }
    for (std::size_t i : idx) {
      const MarketQuote& q = quotes[i];
      const std::optional<double> iv_mkt = market_iv(q, settings);
      if (!iv_mkt) {
        rep.skipped.push_back(i);
        continue;
      }
      try {
        const double price = q.is_call ? slice->call(q.strike) : slice->put(q.strike);
        const double iv = implied_vol(price, settings.S0, q.strike, settings.r, T - settings.t0, q.is_call);
        const double rel = (iv - *iv_mkt) / *iv_mkt;
        ss += rel * rel;
        ++rep.used;
      } catch (const std::exception&) {
        rep.skipped.push_back(i);
      }
    }
  }
  std::sort(rep.skipped.begin(), rep.skipped.end());
  rep.value = rep.used == 0 ? kInf : std::sqrt(ss / static_cast<double>(rep.used));
  return rep;
}

void default_bounds(const PsiLayout& layout, RVec& lower, RVec& upper) {
  lower = {kOpenLower};
  upper = {20.0};
  for (std::size_t i = 0; i <= layout.q; ++i) {
    lower.push_back(0.0);
    upper.push_back(10.0);
  }
  for (std::size_t i = 0; i < layout.p; ++i) {
    lower.push_back(kOpenLower);
    upper.push_back(50.0);
  }
  lower.insert(lower.end(), {-2.0, kOpenLower, kOpenLower});
  upper.insert(upper.end(), {2.0, 3.0, 3.0});
}

namespace {

struct NelderMead {
  std::function<double(const RVec&)> f;
  RVec lower, upper;
  int budget;
  double tol;
  int evals = 0;

  RVec clip(RVec x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  }

  double eval(const RVec& x) {
    ++evals;
    return f(x);
  }

  RestartTrace run(const RVec& start, double scale, SplitMix64& rng, bool randomize) {
    RestartTrace tr;
    tr.start = clip(start);
    const std::size_t n = start.size();
    std::vector<RVec> x(n + 1, tr.start);
    RVec fx(n + 1, kInf);
    fx[0] = eval(x[0]);
    for (std::size_t i = 0; i < n && evals < budget; ++i) {
      const double width = upper[i] - lower[i];
      double step = x[0][i] != 0.0 ? scale * std::abs(x[0][i]) : 0.5 * scale * width;
      if (randomize) step *= 0.5 + rng.uniform();
      if (x[0][i] + step > upper[i]) step = -step;
      x[i + 1][i] = x[0][i] + step;
      x[i + 1] = clip(x[i + 1]);
      fx[i + 1] = eval(x[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
      std::vector<RVec> xs(n + 1);
      RVec fs(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        xs[i] = x[order[i]];
        fs[i] = fx[order[i]];
      }
      x.swap(xs);
      fx.swap(fs);
    };

    while (evals < budget) {
      sort_simplex();
      ++tr.iterations;
      tr.trace.push_back(fx[0]);
      if (std::isfinite(fx[n]) && std::abs(fx[n] - fx[0]) <= tol * (std::abs(fx[0]) + tol)) {
        tr.converged = true;
        break;
      }
      RVec c(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) c[k] += x[i][k] / static_cast<double>(n);
      auto along = [&](const RVec& from, double t) {
        RVec y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = c[k] + t * (from[k] - c[k]);
        return clip(y);
      };
      const RVec xr = along(x[n], -1.0);
      const double fr = eval(xr);
      if (fr < fx[0]) {
        const RVec xe = along(x[n], -2.0);
        const double fe = evals < budget ? eval(xe) : kInf;
        if (fe < fr) {
          x[n] = xe;
          fx[n] = fe;
        } else {
          x[n] = xr;
          fx[n] = fr;
        }
      } else if (fr < fx[n - 1]) {
        x[n] = xr;
        fx[n] = fr;
      } else {
        const bool outside = fr < fx[n];
        const RVec xc = outside ? along(xr, 0.5) : along(x[n], 0.5);
        const double fc = evals < budget ? eval(xc) : kInf;
        if (fc < std::min(fr, fx[n])) {
          x[n] = xc;
          fx[n] = fc;
        } else {
          for (std::size_t i = 1; i <= n && evals < budget; ++i) {
            for (std::size_t k = 0; k < n; ++k) x[i][k] = x[0][k] + 0.5 * (x[i][k] - x[0][k]);
            x[i] = clip(x[i]);
            fx[i] = eval(x[i]);
          }
        }
      }
    }
    sort_simplex();
    tr.best = x[0];
    tr.best_value = fx[0];
    if (tr.trace.empty() || tr.trace.back() != fx[0]) tr.trace.push_back(fx[0]);
    return tr;
  }
};

}  // namespace

CalibResult calibrate(const std::vector<MarketQuote>& quotes, const CalibConfig& config,
                      const EvalObserver& observer) {
  const PsiLayout& layout = config.layout;
  if (quotes.empty()) throw ValidationError("calibrate: no quotes");
  if (config.initial.size() != layout.size()) throw ValidationError("calibrate: initial vector has the wrong length");
  if (config.restarts < 1 || config.max_evaluations < 1) throw ValidationError("calibrate: empty budget");
  RVec lower = config.lower, upper = config.upper;
  if (lower.empty() || upper.empty()) default_bounds(layout, lower, upper);
  if (lower.size() != layout.size() || upper.size() != layout.size())
    throw ValidationError("calibrate: bounds have the wrong length");

  const QuadRule rule = gauss_laguerre(config.pricing.m);
  std::size_t priceable = 0;
  for (const MarketQuote& q : quotes)
    if (market_iv(q, config.pricing)) ++priceable;
  if (priceable == 0) throw ValidationError("calibrate: every quote was skipped (no invertible market observable)");

  const std::string start_issue = feasibility_report(layout, config.initial, config.pricing);
  if (!start_issue.empty()) throw ValidationError("calibrate: infeasible starting point: " + start_issue);

  NelderMead nm;
  nm.f = [&](const RVec& psi) {
    const double v = rrmse(psi, layout, quotes, config.pricing, rule).value;
    if (observer) observer(psi, v);
    return v;
  };
  nm.lower = lower;
  nm.upper = upper;
  nm.tol = config.tolerance;

  CalibResult res;
  SplitMix64 rng(config.seed);
  RVec best = config.initial;
  double best_value = kInf;
  for (int k = 0; k < config.restarts; ++k) {
    const int before = nm.evals;
    nm.budget = before + config.max_evaluations;
    RestartTrace tr = nm.run(best, k == 0 ? 0.1 : 0.05 + 0.2 * rng.uniform(), rng, k > 0);
    tr.evaluations = nm.evals - before;
    if (tr.best_value < best_value) {
      best_value = tr.best_value;
      best = tr.best;
    }
    res.iterations += tr.iterations;
    res.converged = res.converged || tr.converged;
    res.restarts.push_back(std::move(tr));
  }
  if (!std::isfinite(best_value)) throw NumericalError("calibrate: every restart stayed infeasible");

  const ObjectiveReport final_rep = rrmse(best, layout, quotes, config.pricing, rule);
  res.psi_star = best;
  res.objective = final_rep.value;
  res.skipped = final_rep.skipped;
  res.used = final_rep.used;
  res.evaluations = nm.evals;
  return res;
}

}  // namespace chawkes
