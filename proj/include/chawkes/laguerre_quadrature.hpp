#pragma once

// Gauss-Laguerre rules of large order with log-scaled weights.

#include "chawkes/linalg.hpp"

namespace chawkes {

struct QuadRule {
  int m = 0;
  RVec nodes;       // increasing roots of L_m
  RVec weights;     // may underflow to 0 for the largest nodes
  RVec log_scaled;  // ln(weight) + node, finite for every node
};

inline constexpr int kMaxQuadOrder = 2000;

/// Nodes from the Jacobi-matrix eigenproblem (implicit-shift QL), Newton
/// polished on L_m; weights from the normalized eigenvector first components,
/// 1 / sum_{n<m} L_n(u)^2, accumulated with a running log scale.
QuadRule gauss_laguerre(int m);

/// L_n(x) by the three-term recurrence.
double laguerre_eval(int n, double x);

/// ln |L_n(x)| with rescaling, safe for huge x and n.
double laguerre_log_abs(int n, double x);

/// ln of the closed-form weight u / ((m+1)^2 L_{m+1}(u)^2).
double log_weight_closed_form(int m, double node);

/// Eigenvalues of a symmetric tridiagonal matrix (diag d, off-diagonal e with
/// e[i] coupling i and i+1), ascending. Throws NumericalError on non-convergence.
RVec tridiagonal_eigenvalues(RVec d, RVec e);

}  // namespace chawkes
