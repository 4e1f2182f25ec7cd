#include "chawkes/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chawkes/errors.hpp"

namespace chawkes {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get(const json& j, const std::string& where, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ValidationError(where + "." + key + ": " + ex.what());
  }
}

template <typename T>
T require(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) throw ValidationError(where + ": missing key '" + key + "'");
  return get<T>(j, where, key, T{});
}

const std::map<std::string, std::pair<std::size_t, std::size_t>> kFamilies = {
    {"hawkes", {1, 0}}, {"carma21", {2, 1}}, {"carma31", {3, 1}}, {"carma32", {3, 2}}};

Measure parse_measure(const std::string& s) {
  if (s == "P") return Measure::P;
  if (s == "Q") return Measure::Q;
  throw ValidationError("model.jump.measure: expected P or Q, got '" + s + "'");
}

JumpSpec parse_jump(const json& j, std::optional<double>& phi) {
  const std::string where = "model.jump";
  const std::string type = require<std::string>(j, where, "type");
  const Measure measure = parse_measure(get<std::string>(j, where, "measure", "Q"));
  if (j.contains("phi")) phi = get<double>(j, where, "phi", 0.0);
  if (type == "normal") {
    reject_unknown(j, where, {"type", "measure", "phi", "mu_J", "sigma_J"});
    return JumpSpec::normal(require<double>(j, where, "mu_J"), require<double>(j, where, "sigma_J"), measure);
  }
  if (type == "shifted_gamma") {
    reject_unknown(j, where, {"type", "measure", "phi", "alpha", "beta", "shift"});
    const double alpha = require<double>(j, where, "alpha");
    const double beta = require<double>(j, where, "beta");
    if (j.contains("shift")) return JumpSpec::shifted_gamma(alpha, beta, get<double>(j, where, "shift", 0.0), measure);
    return JumpSpec::shifted_gamma(alpha, beta, measure);
  }
  throw ValidationError(where + ".type: expected normal or shifted_gamma, got '" + type + "'");
}

}  // namespace

RunConfig parse_config(const json& root) {
  reject_unknown(root, "config", {"model", "numerics", "calibration"});
  RunConfig c;
  if (!root.contains("model")) throw ValidationError("config: missing 'model' block");

  const json& m = root.at("model");
  reject_unknown(m, "model", {"family", "mu", "a", "b", "jump", "sigma", "r", "S0", "X0", "t0"});
  ModelSection& ms = c.model;
  ms.family = get<std::string>(m, "model", "family", "generic");
  ms.hawkes.mu = require<double>(m, "model", "mu");
  ms.hawkes.a = require<RVec>(m, "model", "a");
  ms.hawkes.b_raw = require<RVec>(m, "model", "b");
  if (ms.family != "generic") {
    const auto it = kFamilies.find(ms.family);
    if (it == kFamilies.end()) throw ValidationError("model.family: unknown family '" + ms.family + "'");
    if (ms.hawkes.p() != it->second.first || ms.hawkes.b_raw.size() != it->second.second + 1)
      throw ValidationError("model.family '" + ms.family + "' does not match the lengths of a and b");
  }
  if (!m.contains("jump")) throw ValidationError("model: missing key 'jump'");
  ms.jump = parse_jump(m.at("jump"), ms.phi);
  if (ms.jump.measure == Measure::P && !ms.phi) throw ValidationError("model.jump: a P-measure law needs 'phi'");
  ms.sigma = get<double>(m, "model", "sigma", 0.0);
  ms.r = get<double>(m, "model", "r", 0.0);
  ms.S0 = get<double>(m, "model", "S0", 100.0);
  ms.X0 = get<RVec>(m, "model", "X0", RVec(ms.hawkes.p(), 0.0));
  ms.t0 = get<double>(m, "model", "t0", 0.0);

  if (root.contains("numerics")) {
    const json& n = root.at("numerics");
    reject_unknown(n, "numerics",
                   {"m", "n_steps", "scheme", "mc_paths", "seed", "pmf_n_max", "series_eps", "control_variate",
                    "cv_beta"});
    NumericsSection& ns = c.numerics;
    ns.m = get<int>(n, "numerics", "m", ns.m);
    ns.n_steps = get<int>(n, "numerics", "n_steps", ns.n_steps);
    const std::string scheme = get<std::string>(n, "numerics", "scheme", "euler");
    if (scheme != "euler" && scheme != "rk4") throw ValidationError("numerics.scheme: expected euler or rk4");
    ns.scheme = scheme == "rk4" ? OdeScheme::RK4 : OdeScheme::Euler;
    ns.mc_paths = get<std::size_t>(n, "numerics", "mc_paths", ns.mc_paths);
    ns.seed = get<std::uint64_t>(n, "numerics", "seed", ns.seed);
    ns.pmf_n_max = get<int>(n, "numerics", "pmf_n_max", ns.pmf_n_max);
    ns.series_eps = get<double>(n, "numerics", "series_eps", ns.series_eps);
    ns.control_variate = get<bool>(n, "numerics", "control_variate", ns.control_variate);
    const std::string beta = get<std::string>(n, "numerics", "cv_beta", "pilot");
    if (beta != "pilot" && beta != "unit") throw ValidationError("numerics.cv_beta: expected pilot or unit");
    ns.cv_beta = beta == "unit" ? BetaMode::Unit : BetaMode::Pilot;
    if (ns.m < 1 || ns.m > kMaxQuadOrder) throw ValidationError("numerics.m out of range");
    if (ns.n_steps < 1) throw ValidationError("numerics.n_steps must be >= 1");
    if (ns.pmf_n_max < 0) throw ValidationError("numerics.pmf_n_max must be >= 0");
    if (!(ns.series_eps > 0.0 && ns.series_eps < 1.0)) throw ValidationError("numerics.series_eps must lie in (0,1)");
  }

  if (root.contains("calibration")) {
    const json& k = root.at("calibration");
    reject_unknown(k, "calibration",
                   {"max_evaluations", "restarts", "tolerance", "seed", "min_liquidity", "lower", "upper"});
    CalibrationSection& cs = c.calibration;
    cs.max_evaluations = get<int>(k, "calibration", "max_evaluations", cs.max_evaluations);
    cs.restarts = get<int>(k, "calibration", "restarts", cs.restarts);
    cs.tolerance = get<double>(k, "calibration", "tolerance", cs.tolerance);
    cs.seed = get<std::uint64_t>(k, "calibration", "seed", cs.seed);
    cs.min_liquidity = get<long>(k, "calibration", "min_liquidity", cs.min_liquidity);
    cs.lower = get<RVec>(k, "calibration", "lower", {});
    cs.upper = get<RVec>(k, "calibration", "upper", {});
    const std::size_t n = layout_of(c.model).size();
    if ((!cs.lower.empty() && cs.lower.size() != n) || (!cs.upper.empty() && cs.upper.size() != n))
      throw ValidationError("calibration bounds must have p+q+5 entries");
  }
  build_model(c);  // surfaces validation errors at load time
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ValidationError("config '" + path + "': " + ex.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  const ModelSection& m = c.model;
  json jump;
  jump["type"] = to_string(m.jump.family);
  jump["measure"] = to_string(m.jump.measure);
  if (m.jump.family == JumpFamily::Normal) {
    jump["mu_J"] = m.jump.mu_J;
    jump["sigma_J"] = m.jump.sigma_J;
  } else {
    jump["alpha"] = m.jump.alpha;
    jump["beta"] = m.jump.beta;
    jump["shift"] = m.jump.shift;
  }
  if (m.phi) jump["phi"] = *m.phi;

  json out;
  out["model"] = {{"family", m.family}, {"mu", m.hawkes.mu}, {"a", m.hawkes.a}, {"b", m.hawkes.b_raw},
                  {"jump", jump},       {"sigma", m.sigma},   {"r", m.r},        {"S0", m.S0},
                  {"X0", m.X0},         {"t0", m.t0}};
  const NumericsSection& n = c.numerics;
  out["numerics"] = {{"m", n.m},
                     {"n_steps", n.n_steps},
                     {"scheme", n.scheme == OdeScheme::RK4 ? "rk4" : "euler"},
                     {"mc_paths", n.mc_paths},
                     {"seed", n.seed},
                     {"pmf_n_max", n.pmf_n_max},
                     {"series_eps", n.series_eps},
                     {"control_variate", n.control_variate},
                     {"cv_beta", n.cv_beta == BetaMode::Unit ? "unit" : "pilot"}};
  const CalibrationSection& k = c.calibration;
  out["calibration"] = {{"max_evaluations", k.max_evaluations},
                        {"restarts", k.restarts},
                        {"tolerance", k.tolerance},
                        {"seed", k.seed},
                        {"min_liquidity", k.min_liquidity},
                        {"lower", k.lower},
                        {"upper", k.upper}};
  return out;
}

RiskNeutralModel build_model(const RunConfig& c) {
  const ModelSection& m = c.model;
  RiskNeutralModel model;
  model.hawkes = m.hawkes;
  model.sigma = m.sigma;
  model.r = m.r;
  model.S0 = m.S0;
  model.X0 = m.X0;
  model.t0 = m.t0;
  if (m.jump.measure == Measure::Q) {
    model.jump_Q = m.jump;
  } else {
    const EsscherSolution sol = solve_theta_star(m.jump, *m.phi);
    model.jump_Q = esscher_transform(m.jump, sol.theta_star);
  }
  model.check();
  return model;
}

PsiLayout layout_of(const ModelSection& m) { return {m.hawkes.p(), m.hawkes.b_raw.size() - 1}; }

PricingSettings pricing_settings(const RunConfig& c) {
  PricingSettings s;
  s.m = c.numerics.m;
  s.n_steps = c.numerics.n_steps;
  s.r = c.model.r;
  s.S0 = c.model.S0;
  s.X0 = c.model.X0;
  s.t0 = c.model.t0;
  return s;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& what, const std::string& at) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || !std::isfinite(v)) throw ValidationError(at + ": invalid " + what + " '" + s + "'");
  return v;
}

}  // namespace

std::vector<MarketQuote> read_quotes_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty quote file");
  const std::vector<std::string> header = split_csv(line);
  const std::vector<std::string> required = {"strike", "maturity", "observable_type", "observable", "option_type"};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const std::string& name : required)
    if (!col.count(name)) throw ValidationError(source + ":1: missing column '" + name + "'");
  const bool has_volume = col.count("volume") > 0;
  const bool has_oi = col.count("open_interest") > 0;

  std::vector<MarketQuote> quotes;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = source + ":" + std::to_string(lineno);
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size())
      throw ValidationError(at + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(cells.size()));
    MarketQuote q;
    q.strike = parse_number(cells[col["strike"]], "strike", at);
    q.maturity = parse_number(cells[col["maturity"]], "maturity", at);
    const std::string& type = cells[col["observable_type"]];
    if (type == "price") q.observable_type = ObservableType::Price;
    else if (type == "iv") q.observable_type = ObservableType::Iv;
    else throw ValidationError(at + ": observable_type must be price or iv, got '" + type + "'");
    q.observable = parse_number(cells[col["observable"]], "observable", at);
    const std::string& kind = cells[col["option_type"]];
    if (kind == "call") q.is_call = true;
    else if (kind == "put") q.is_call = false;
    else throw ValidationError(at + ": option_type must be call or put, got '" + kind + "'");
    if (!(q.strike > 0.0) || !(q.maturity > 0.0)) throw ValidationError(at + ": strike and maturity must be > 0");
    if (has_volume && !cells[col["volume"]].empty())
      q.volume = static_cast<long>(parse_number(cells[col["volume"]], "volume", at));
    if (has_oi && !cells[col["open_interest"]].empty())
      q.open_interest = static_cast<long>(parse_number(cells[col["open_interest"]], "open_interest", at));
    quotes.push_back(q);
  }
  return quotes;
}

std::vector<MarketQuote> load_quotes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open quotes '" + path + "'");
  return read_quotes_csv(in, path);
}

}  // namespace chawkes
