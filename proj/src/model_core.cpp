#include "chawkes/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chawkes/errors.hpp"

namespace chawkes {

RMatrix build_companion(std::span<const double> a) {
  if (a.empty()) throw ValidationError("build_companion: empty autoregressive coefficient vector");
  const std::size_t p = a.size();
  RMatrix A(p, p);
  for (std::size_t i = 0; i + 1 < p; ++i) A(i, i + 1) = 1.0;
  for (std::size_t j = 0; j < p; ++j) A(p - 1, j) = -a[p - 1 - j];
  return A;
}

RVec pad_b(std::span<const double> b_raw, std::size_t p) {
  if (b_raw.size() > p) {
    std::ostringstream msg;
    msg << "pad_b: q+1 = " << b_raw.size() << " exceeds p = " << p;
    throw ValidationError(msg.str());
  }
  RVec b(p, 0.0);
  std::copy(b_raw.begin(), b_raw.end(), b.begin());
  return b;
}

namespace {

// Value and derivative of the monic polynomial at z (Horner).
std::pair<cplx, cplx> horner(std::span<const double> c, cplx z) {
  cplx value = 1.0;
  cplx deriv = 0.0;
  for (double ck : c) {
    deriv = deriv * z + value;
    value = value * z + ck;
  }
  return {value, deriv};
}

}  // namespace

CVec monic_polynomial_roots(std::span<const double> c) {
  const std::size_t n = c.size();
  if (n == 0) return {};
  if (n == 1) return {cplx(-c[0], 0.0)};

  double radius = 0.0;
  for (double ck : c) radius = std::max(radius, std::abs(ck));
  radius = std::max(1e-3, std::min(1.0 + radius, 2.0 * std::pow(std::abs(c[n - 1]) + 1e-300, 1.0 / n) + 1.0));

  CVec z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    z[k] = std::polar(radius, angle);
  }

  constexpr int kMaxIter = 1000;
  bool converged = false;
  for (int iter = 0; iter < kMaxIter && !converged; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [value, deriv] = horner(c, z[i]);
      if (value == cplx{}) continue;
      const cplx ratio = value / deriv;
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[i])));
    }
    converged = max_step < 1e-15;
  }

  for (cplx& root : z) {
    for (int k = 0; k < 3; ++k) {
      const auto [value, deriv] = horner(c, root);
      if (deriv == cplx{}) break;
      const cplx candidate = root - value / deriv;
      if (std::abs(horner(c, candidate).first) <= std::abs(value)) root = candidate;
    }
    if (std::abs(root.imag()) < 1e-12 * std::max(1.0, std::abs(root))) root = cplx(root.real(), 0.0);
  }
  std::sort(z.begin(), z.end(), [](const cplx& x, const cplx& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return z;
}

Eigensystem eigendecompose(const RMatrix& companion) {
  const std::size_t p = companion.rows();
  if (p == 0 || companion.cols() != p) throw ValidationError("eigendecompose: expected a square companion matrix");
  RVec coeffs(p);
  for (std::size_t k = 1; k <= p; ++k) coeffs[k - 1] = -companion(p - 1, p - k);

  Eigensystem out;
  out.eigenvalues = monic_polynomial_roots(coeffs);

  double scale = 0.0;
  for (const cplx& l : out.eigenvalues) scale = std::max(scale, std::abs(l));
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      min_gap = std::min(min_gap, std::abs(out.eigenvalues[i] - out.eigenvalues[j]));
  if (p > 1 && !(min_gap > kEigenGapTolerance * scale && min_gap > 0.0)) {
    std::ostringstream msg;
    msg << "eigendecompose: non-diagonalizable within tolerance (min eigenvalue gap " << min_gap << ")";
    throw NumericalError(msg.str());
  }

  out.S = CMatrix(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    cplx power = 1.0;
    for (std::size_t k = 0; k < p; ++k) {
      out.S(k, j) = power;
      power *= out.eigenvalues[j];
    }
  }
  out.S_inv = inverse(out.S);
  return out;
}

CompanionSystem::CompanionSystem(const CarmaHawkesParams& params)
    : A_(build_companion(params.a)), b_(pad_b(params.b_raw, params.a.size())), e_(params.a.size(), 0.0) {
  if (params.b_raw.empty()) throw ValidationError("CarmaHawkesParams: empty moving-average vector");
  e_.back() = 1.0;
  eig_ = eigendecompose(A_);
  const std::size_t p = dim();
  bS_.assign(p, cplx{});
  Sinv_e_.assign(p, cplx{});
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) bS_[j] += b_[k] * eig_.S(k, j);
    Sinv_e_[j] = eig_.S_inv(j, p - 1);
  }
}

double CompanionSystem::max_real_eigenvalue() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const cplx& l : eigenvalues()) m = std::max(m, l.real());
  return m;
}

RMatrix CompanionSystem::expm(double t) const {
  const std::size_t p = dim();
  CVec scaled(p);
  for (std::size_t j = 0; j < p; ++j) scaled[j] = std::exp(eigenvalues()[j] * t);
  RMatrix out(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < p; ++k) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += S()(i, j) * scaled[j] * S_inv()(j, k);
      out(i, k) = acc.real();
    }
  return out;
}

CVec CompanionSystem::to_modal(std::span<const double> x) const {
  const std::size_t p = dim();
  CVec z(p, cplx{});
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < p; ++k) z[j] += S_inv()(j, k) * x[k];
  return z;
}

StateVector CompanionSystem::propagate(std::span<const double> x, double dt) const {
  const std::size_t p = dim();
  CVec z = to_modal(x);
  for (std::size_t j = 0; j < p; ++j) z[j] *= std::exp(eigenvalues()[j] * dt);
  StateVector out(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) acc += S()(i, j) * z[j];
    out[i] = acc.real();
  }
  return out;
}

double CompanionSystem::kernel(double t) const {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) acc += bS_[j] * std::exp(eigenvalues()[j] * t) * Sinv_e_[j];
  return acc.real();
}

CarmaHawkes::CarmaHawkes(CarmaHawkesParams params) : params_(std::move(params)), sys_(params_) {}

double CarmaHawkes::intensity(std::span<const double> x) const {
  double acc = params_.mu;
  for (std::size_t i = 0; i < dim(); ++i) acc += sys_.b()[i] * x[i];
  return acc;
}

StateVector CarmaHawkes::propagate_state(std::span<const double> x, double dt) const {
  if (dt < 0.0) throw ValidationError("propagate_state: negative time step");
  if (dt == 0.0) return StateVector(x.begin(), x.end());
  return sys_.propagate(x, dt);
}

StateVector CarmaHawkes::add_jump(StateVector x) const {
  x.back() += 1.0;
  return x;
}

double CarmaHawkes::branching_ratio() const {
  const RVec y = lu_solve(sys_.A(), sys_.e());
  double acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) acc -= sys_.b()[i] * y[i];
  return acc;
}

Diagnostics validate(const CarmaHawkesParams& params, std::optional<double> horizon) {
  Diagnostics d;
  std::ostringstream msg;
  if (params.a.empty() || params.b_raw.empty() || params.b_raw.size() > params.a.size()) {
    d.message = "invalid orders: need p >= 1 and 0 <= q < p";
    return d;
  }
  // mu = 0 is kept as the event-free degeneracy (pure diffusion limit).
  const bool mu_ok = params.mu >= 0.0 && std::isfinite(params.mu);
  if (!mu_ok) msg << "baseline intensity mu must be >= 0; ";

  std::optional<CarmaHawkes> model;
  try {
    model.emplace(params);
    d.diagonalizable = true;
  } catch (const std::exception& ex) {
    d.message = msg.str() + ex.what();
    return d;
  }
  const CompanionSystem& sys = model->system();
  for (const cplx& l : sys.eigenvalues()) d.eigen_real_parts.push_back(l.real());
  const double max_re = sys.max_real_eigenvalue();

  bool all_negative = max_re < 0.0;
  if (all_negative) {
    d.branching_ratio = model->branching_ratio();
  } else {
    d.branching_ratio = std::numeric_limits<double>::infinity();
    msg << "eigenvalue with non-negative real part; ";
  }
  d.stationary = all_negative && d.branching_ratio < 1.0;
  if (all_negative && !(d.branching_ratio < 1.0)) msg << "branching ratio " << d.branching_ratio << " >= 1; ";

  d.horizon = horizon.value_or(all_negative ? 10.0 / std::abs(max_re) : 10.0);
  d.min_kernel = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kKernelGridPoints; ++i) {
    const double t = d.horizon * static_cast<double>(i) / static_cast<double>(kKernelGridPoints - 1);
    d.min_kernel = std::min(d.min_kernel, sys.kernel(t));
  }
  d.kernel_nonnegative = d.min_kernel >= -1e-12;
  if (!d.kernel_nonnegative) msg << "kernel negative on grid (min " << d.min_kernel << "); ";

  d.pass = mu_ok && d.stationary && d.kernel_nonnegative;
  d.message = d.pass ? "ok" : msg.str();
  return d;
}

}  // namespace chawkes
