#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtensor/bootstrap.hpp"
#include "mtensor/linsolve.hpp"
#include "mtensor/tensor.hpp"

namespace mtensor {

/// Parameters of the nonnegativity preserving Newton iteration.
struct SolverConfig {
  double delta1 = 0.2;  ///< backtracking base for the max-residual coordinate
  double delta2 = 0.5;  ///< backtracking base for the reduced Newton step
  double tol = 1e-10;   ///< stop once ||A~ x^{m-1} - b~||_2 <= tol
  int max_iter = 2000;
  int p_max = 64;
  int q_max = 64;
  /// Zero-classification band; unset means 1e-12 * (1 + ||b~||_inf).
  std::optional<double> eps_active;
  LinearSolverOptions linear;
  BootstrapConfig bootstrap;
  /// Scale A and b by the largest absolute entry before iterating.
  bool scale = true;
  /// Kernels are sequential, so every solve is reproducible; kept for the
  /// CLI contract.
  bool deterministic = true;
  /// Skip the nonsingular M-tensor certification of A.
  bool skip_certification = false;
  /// Check the monotonicity, feasibility, zero-set and M-matrix invariants
  /// on every iteration and stop at the first violation.
  bool audit = false;

  void validate() const;
};

class BacktrackFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index classification of one iteration.
struct ActivePartition {
  Index j = 0;               ///< max-residual index
  std::vector<Index> I;      ///< positive residual, excluding j
  std::vector<Index> Ibar;   ///< residual within the zero band
  std::vector<Index> J;      ///< zero residual and zero iterate (subset of Ibar)
};

/// A~ = A / kappa, b~ = b / kappa with kappa the largest absolute entry of A and b.
struct ScaledProblem {
  SquareTensor A;
  Vector b;
  double kappa = 1.0;
};

[[nodiscard]] ScaledProblem scale_problem(const SquareTensor& A, const Vector& b);

/// F(x) = A x^{m-1} - b.
[[nodiscard]] Vector residual(const SquareTensor& A, const Vector& b, const Vector& x);

/// Splits [n] by the residual F at x. Returns nullopt when every component
/// is within the zero band (the system is solved). Ties for j go to the
/// smallest index.
[[nodiscard]] std::optional<ActivePartition> classify(const Vector& F, const Vector& x, double eps_active);

struct CoordinateStep {
  double x_j = 0.0;
  int p = 0;
};

/// Shrinks x_j toward zero: x_j (1 - delta1^p) for the smallest p with
/// F_j(..., x_j (1 - delta1^p), ...) >= -eps_active. Throws BacktrackFailure
/// when no p <= p_max qualifies.
[[nodiscard]] CoordinateStep coordinate_step(const SquareTensor& A, const Vector& b, const Vector& x, Index j,
                                             double delta1, int p_max, double eps_active = 0.0);

struct NewtonStep {
  Vector x_I;               ///< new values on partition.I
  Vector direction;         ///< d_I
  Matrix reduced_jacobian;  ///< [F'(x)]_{II}
  int q = 0;
  LinearSolveReport linear;
};

/// Reduced Newton step on the positive-residual set, evaluated at the
/// current iterate (x_j unchanged), backtracked until F_I >= -eps_active and
/// x_I >= 0. Abar must be the semi-symmetrization of A and F the residual at
/// x. An empty I is a no-op reported with q = -1.
[[nodiscard]] NewtonStep newton_step(const SquareTensor& A, const SquareTensor& Abar, const Vector& b,
                                     const Vector& x, const Vector& F, const ActivePartition& partition,
                                     const SolverConfig& cfg, double eps_active);

enum class SolveStatus {
  converged,
  max_iter,
  backtrack_failure,
  bootstrap_failure,
  linear_solve_failure,
  stagnated,  ///< every residual is inside the zero band but ReErr > tol
  invariant_violated,
};

[[nodiscard]] std::string_view to_string(SolveStatus status);

/// One row per visited iterate. The last row describes the returned iterate
/// and carries p = q = -1 because no step was taken from it.
struct IterationRecord {
  int iter = 0;
  double x_norm = 0.0;
  double re_err = 0.0;
  int j = -1;
  int card_I = 0;
  int card_Ibar = 0;
  int card_J = 0;
  int p = -1;
  int q = -1;
};

struct SolveReport {
  SolveStatus status = SolveStatus::max_iter;
  Vector x;  ///< final iterate, in the units of the input problem
  double re_err = 0.0;
  int iterations = 0;
  double kappa = 1.0;
  double eps_active = 0.0;
  bool bootstrapped = false;
  std::vector<IterationRecord> trace;
  std::vector<std::string> violations;
  std::string message;
  double wall_seconds = 0.0;
};

/// Runs the nonnegativity preserving iteration on A x^{m-1} = b.
///
/// Requires b >= 0 and (unless cfg.skip_certification) a certified
/// nonsingular M-tensor A; violations throw std::invalid_argument or
/// StructureError. Numerical failures are reported through the status.
[[nodiscard]] SolveReport solve(const SquareTensor& A, const Vector& b, const std::optional<Vector>& x0,
                                const SolverConfig& cfg = {});

}  // namespace mtensor
