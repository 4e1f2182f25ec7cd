#include "chawkes/laguerre_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chawkes/errors.hpp"

namespace chawkes {

RVec tridiagonal_eigenvalues(RVec d, RVec e) {
  const std::size_t n = d.size();
  if (n == 0) return d;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  constexpr int kMaxSweeps = 60;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t mm;
    do {
      for (mm = l; mm + 1 < n; ++mm) {
        const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (mm != l) {
        if (iter++ == kMaxSweeps) throw NumericalError("tridiagonal_eigenvalues: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = mm; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[mm] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[mm] = 0.0;
      }
    } while (mm != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

double laguerre_eval(int n, double x) {
  if (n < 0) throw ValidationError("laguerre_eval: negative degree");
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Runs the recurrence to degree n keeping (L_{n-1}, L_n) scaled by exp(-log_scale).
struct ScaledPair {
  double prev;
  double cur;
  double log_scale;
};

ScaledPair laguerre_scaled(int n, double x) {
  ScaledPair s{0.0, 1.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * s.cur - k * s.prev) / (k + 1.0);
    s.prev = s.cur;
    s.cur = next;
    if (std::abs(s.cur) > kRescale) {
      s.cur /= kRescale;
      s.prev /= kRescale;
      s.log_scale += kLogRescale;
    }
  }
  return s;
}

// ln of sum_{n<m} L_n(x)^2.
double log_christoffel_sum(int m, double x) {
  double prev = 0.0, cur = 1.0, sum = 0.0, log_scale = 0.0;
  for (int k = 0; k < m; ++k) {
    sum += cur * cur;
    if (k + 1 == m) break;
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      sum /= kRescale * kRescale;
      log_scale += kLogRescale;
    }
  }
  return std::log(sum) + 2.0 * log_scale;
}

}  // namespace

double laguerre_log_abs(int n, double x) {
  if (n < 0) throw ValidationError("laguerre_log_abs: negative degree");
  const ScaledPair s = laguerre_scaled(n, x);
  return std::log(std::abs(s.cur)) + s.log_scale;
}

double log_weight_closed_form(int m, double node) {
  return std::log(node) - 2.0 * std::log(m + 1.0) - 2.0 * laguerre_log_abs(m + 1, node);
}

QuadRule gauss_laguerre(int m) {
  if (m < 1 || m > kMaxQuadOrder) {
    std::ostringstream msg;
    msg << "gauss_laguerre: order " << m << " outside [1, " << kMaxQuadOrder << "]";
    throw ValidationError(msg.str());
  }
  RVec diag(m), off(m, 0.0);
  for (int k = 0; k < m; ++k) {
    diag[k] = 2.0 * k + 1.0;
    off[k] = k + 1.0;
  }
  QuadRule rule;
  rule.m = m;
  rule.nodes = tridiagonal_eigenvalues(std::move(diag), std::move(off));

  // Newton polish: L_m'(x) = m (L_m(x) - L_{m-1}(x)) / x; the ratio is scale free.
  for (double& x : rule.nodes) {
    for (int it = 0; it < 3; ++it) {
      const ScaledPair s = laguerre_scaled(m, x);
      const double deriv = m * (s.cur - s.prev) / x;
      if (deriv == 0.0) break;
      const double step = s.cur / deriv;
      if (!std::isfinite(step) || std::abs(step) > 1e-6 * std::max(1.0, x)) break;
      x -= step;
      if (std::abs(step) <= 1e-16 * x) break;
    }
  }

  rule.weights.resize(m);
  rule.log_scaled.resize(m);
  for (int k = 0; k < m; ++k) {
    const double log_w = -log_christoffel_sum(m, rule.nodes[k]);
    rule.log_scaled[k] = log_w + rule.nodes[k];
    rule.weights[k] = std::exp(log_w);
  }
  return rule;
}

}  // namespace chawkes
