#pragma once

// CARMA(p,q)-Hawkes state machinery: lambda_t = mu + b^T X_t with
// dX_t = A X_t dt + e dN_t, A in companion form.

#include <optional>
#include <span>
#include <string>

#include "chawkes/linalg.hpp"

namespace chawkes {

struct CarmaHawkesParams {
  double mu = 0.0;
  RVec a;      // a_1..a_p
  RVec b_raw;  // b_0..b_q, q < p

  std::size_t p() const { return a.size(); }
  std::size_t q() const { return b_raw.empty() ? 0 : b_raw.size() - 1; }
};

using StateVector = RVec;

/// Companion matrix: shifted identity on top, (-a_p, ..., -a_1) on the bottom row.
RMatrix build_companion(std::span<const double> a);

/// Zero-pads b_0..b_q to length p.
RVec pad_b(std::span<const double> b_raw, std::size_t p);

/// Roots of x^n + c[0] x^(n-1) + ... + c[n-1] by Aberth-Ehrlich simultaneous
/// iteration followed by Newton polishing. Ordered by decreasing real part.
CVec monic_polynomial_roots(std::span<const double> c);

struct Eigensystem {
  CVec eigenvalues;
  CMatrix S;  // Vandermonde: S(k, j) = lambda_j^k
  CMatrix S_inv;
};

/// Minimum pairwise eigenvalue distance accepted, relative to max |lambda|.
inline constexpr double kEigenGapTolerance = 1e-7;

/// Eigendecomposition of a companion matrix through its characteristic
/// polynomial. Throws NumericalError("non-diagonalizable within tolerance")
/// when two eigenvalues are closer than kEigenGapTolerance * max|lambda|.
Eigensystem eigendecompose(const RMatrix& companion);

class CompanionSystem {
 public:
  explicit CompanionSystem(const CarmaHawkesParams& params);

  std::size_t dim() const { return A_.rows(); }
  const RMatrix& A() const { return A_; }
  const RVec& b() const { return b_; }
  const RVec& e() const { return e_; }
  const CVec& eigenvalues() const { return eig_.eigenvalues; }
  const CMatrix& S() const { return eig_.S; }
  const CMatrix& S_inv() const { return eig_.S_inv; }
  const CVec& bS() const { return bS_; }         // b^T S
  const CVec& Sinv_e() const { return Sinv_e_; }  // S^{-1} e
  double max_real_eigenvalue() const;

  RMatrix expm(double t) const;  // e^{A t}
  StateVector propagate(std::span<const double> x, double dt) const;
  double kernel(double t) const;  // b^T e^{A t} e

  CVec to_modal(std::span<const double> x) const;  // S^{-1} x

 private:
  RMatrix A_;
  RVec b_;
  RVec e_;
  Eigensystem eig_;
  CVec bS_;
  CVec Sinv_e_;
};

/// Parameters bundled with their decomposition. Immutable.
class CarmaHawkes {
 public:
  explicit CarmaHawkes(CarmaHawkesParams params);

  const CarmaHawkesParams& params() const { return params_; }
  const CompanionSystem& system() const { return sys_; }
  std::size_t dim() const { return sys_.dim(); }
  double mu() const { return params_.mu; }

  double kernel(double t) const { return sys_.kernel(t); }
  /// mu + b^T x. A negative result flags a positivity violation.
  double intensity(std::span<const double> x) const;
  StateVector propagate_state(std::span<const double> x, double dt) const;
  StateVector add_jump(StateVector x) const;
  /// -b^T A^{-1} e, the integral of the kernel over [0, inf).
  double branching_ratio() const;

 private:
  CarmaHawkesParams params_;
  CompanionSystem sys_;
};

struct Diagnostics {
  RVec eigen_real_parts;
  double branching_ratio = 0.0;
  double min_kernel = 0.0;
  double horizon = 0.0;
  bool diagonalizable = false;
  bool stationary = false;
  bool kernel_nonnegative = false;
  bool pass = false;
  std::string message;
};

inline constexpr std::size_t kKernelGridPoints = 4096;

/// Stationarity (Re lambda < 0, branching ratio < 1) and kernel sign on a
/// uniform grid over [0, horizon]; horizon defaults to 10 / |max Re lambda|.
/// Never throws for well-shaped input; malformed shapes are reported as failures.
Diagnostics validate(const CarmaHawkesParams& params, std::optional<double> horizon = std::nullopt);

}  // namespace chawkes
