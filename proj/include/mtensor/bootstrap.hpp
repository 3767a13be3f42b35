#pragma once

#include <optional>
#include <stdexcept>

#include "mtensor/structure.hpp"
#include "mtensor/tensor.hpp"

namespace mtensor {

class BootstrapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BootstrapConfig {
  double epsilon_value = 1e-3;  ///< shift added to the zero components of b
  double inner_tol = 1e-12;
  int inner_maxit = 10000;
};

/// b + eps, where eps_i = eps_val on the zero components of b and 0 elsewhere.
[[nodiscard]] Vector perturb_rhs(const Vector& b, double eps_val);

struct PositiveSolution {
  Vector x;
  int iterations = 0;
  /// Largest componentwise decrease between consecutive sweeps; the sweeps
  /// are monotone non-decreasing in exact arithmetic, so this stays at
  /// rounding level.
  double max_decrease = 0.0;
};

/// Positive solution of A x^{m-1} = b_pos (b_pos > 0) by Jacobi sweeps on the
/// split A = s I - B, started from (b_pos / s)^{1/(m-1)}, which lies below the
/// solution. Stops when ||A x^{m-1} - b_pos||_2 <= inner_tol (1 + ||b_pos||_2).
[[nodiscard]] PositiveSolution solve_positive(const SquareTensor& A, const MTensorDecomposition& split,
                                              const Vector& b_pos, const BootstrapConfig& cfg = {});

/// Convenience overload that splits A itself; A must be certified.
[[nodiscard]] PositiveSolution solve_positive(const SquareTensor& A, const Vector& b_pos,
                                              const BootstrapConfig& cfg = {});

struct StartPoint {
  Vector x;
  bool bootstrapped = false;
  int inner_iterations = 0;
};

/// True when x >= 0 and A x^{m-1} - b >= -eps_active componentwise.
[[nodiscard]] bool is_feasible_start(const SquareTensor& A, const Vector& b, const Vector& x, double eps_active);

/// Returns the user point when it is feasible; otherwise solves the perturbed
/// system A x^{m-1} = b + eps and returns its positive solution, which
/// satisfies A x^{m-1} - b = eps >= 0.
[[nodiscard]] StartPoint make_start(const SquareTensor& A, const MTensorDecomposition& split, const Vector& b,
                                    const std::optional<Vector>& user_x0, double eps_active,
                                    const BootstrapConfig& cfg = {});

}  // namespace mtensor
