#include "mtensor/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mtensor {

Vector perturb_rhs(const Vector& b, double eps_val) {
  if (!(eps_val > 0.0)) throw std::invalid_argument("perturbation must be positive");
  if ((b.array() < 0.0).any()) throw std::invalid_argument("right-hand side must be nonnegative");
  Vector shifted = b;
  for (Eigen::Index i = 0; i < shifted.size(); ++i) {
    if (shifted[i] == 0.0) shifted[i] = eps_val;
  }
  return shifted;
}

PositiveSolution solve_positive(const SquareTensor& A, const MTensorDecomposition& split, const Vector& b_pos,
                                const BootstrapConfig& cfg) {
  if (b_pos.size() != A.dim()) throw DimensionMismatch("right-hand side does not match tensor dimension");
  if (!(b_pos.array() > 0.0).all()) throw std::invalid_argument("solve_positive needs a strictly positive rhs");

  const double target = cfg.inner_tol * (1.0 + b_pos.norm());
  const int degree = A.order() - 1;
  PositiveSolution out;
  out.x = (b_pos / split.s).array().pow(1.0 / degree).matrix();
  for (;;) {
    const double residual = (contract_m1(A, out.x) - b_pos).norm();
    if (!std::isfinite(residual)) throw BootstrapError("Jacobi sweeps diverged");
    if (residual <= target) return out;
    if (out.iterations >= cfg.inner_maxit) {
      throw BootstrapError("positive solve did not converge in " + std::to_string(cfg.inner_maxit) +
                           " sweeps (residual " + std::to_string(residual) + ")");
    }
    Vector next = jacobi_update(split, out.x, b_pos);
    out.max_decrease = std::max(out.max_decrease, (out.x - next).maxCoeff());
    out.x = std::move(next);
    ++out.iterations;
  }
}

PositiveSolution solve_positive(const SquareTensor& A, const Vector& b_pos, const BootstrapConfig& cfg) {
  const MTensorSplit split = mtensor_split(A);
  if (!split.certified()) throw BootstrapError("tensor is not certified as a nonsingular M-tensor");
  return solve_positive(A, split.decomposition, b_pos, cfg);
}

bool is_feasible_start(const SquareTensor& A, const Vector& b, const Vector& x, double eps_active) {
  if (x.size() != A.dim() || !x.allFinite() || (x.array() < 0.0).any()) return false;
  return ((contract_m1(A, x) - b).array() >= -eps_active).all();
}

StartPoint make_start(const SquareTensor& A, const MTensorDecomposition& split, const Vector& b,
                      const std::optional<Vector>& user_x0, double eps_active, const BootstrapConfig& cfg) {
  if (b.size() != A.dim()) throw DimensionMismatch("right-hand side does not match tensor dimension");
  if (user_x0) {
    if (user_x0->size() != A.dim()) throw DimensionMismatch("starting point does not match tensor dimension");
    if (is_feasible_start(A, b, *user_x0, eps_active)) return StartPoint{*user_x0, false, 0};
  }
  PositiveSolution positive = solve_positive(A, split, perturb_rhs(b, cfg.epsilon_value), cfg);

  // Jacobi sweeps approach from below, so A x^{m-1} sits a rounding-level
  // amount under b + eps. A x^{m-1} is homogeneous of degree m-1, so a
  // uniform stretch of x lifts every component back above b.
  const double degree = A.order() - 1;
  for (int lift = 0; lift < 3; ++lift) {
    const Vector image = contract_m1(A, positive.x);
    if (!(image.array() > 0.0).all()) throw BootstrapError("perturbed solution is not a positive M-tensor image");
    const double ratio = (b.array() / image.array()).maxCoeff();
    if (ratio <= 1.0) break;
    positive.x *= std::pow(ratio, 1.0 / degree) * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
  }
  if (!is_feasible_start(A, b, positive.x, eps_active)) {
    throw BootstrapError("perturbed solution does not satisfy A x^{m-1} >= b");
  }
  return StartPoint{positive.x, true, positive.iterations};
}

}  // namespace mtensor
