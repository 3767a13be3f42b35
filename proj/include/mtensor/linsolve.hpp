#pragma once

#include <stdexcept>

#include "mtensor/tensor.hpp"

namespace mtensor {

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearSolverOptions {
  int direct_threshold = 20;  ///< dense LU below this dimension, Krylov at or above
  double lin_tol = 1e-12;     ///< relative residual bound ||M d - r|| <= lin_tol ||r||
  int lin_maxit = 0;          ///< Krylov iteration cap; 0 means 10 * dim
};

enum class LinearMethod { direct, iterative };

struct LinearSolveReport {
  LinearMethod method = LinearMethod::direct;
  int iterations = 0;
  double residual_norm = 0.0;  ///< ||M d - r||_2, recomputed after the solve
  Vector solution;
};

/// Solves M d = r for a (possibly nonsymmetric) nonsingular M-matrix M.
///
/// The direct path is partial-pivot LU with up to two refinement sweeps; the
/// iterative path is BiCGSTAB with a Jacobi preconditioner, restarted from
/// its own iterate while the recomputed residual misses the bound. Throws
/// LinearSolveError on a numerically singular factorization or when the
/// residual bound cannot be met.
[[nodiscard]] LinearSolveReport solve_m_system(const Matrix& M, const Vector& r,
                                               const LinearSolverOptions& options = {});

/// Forces one path regardless of the threshold.
[[nodiscard]] LinearSolveReport solve_m_system(const Matrix& M, const Vector& r, LinearMethod method,
                                               const LinearSolverOptions& options = {});

}  // namespace mtensor
