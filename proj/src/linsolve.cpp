#include "mtensor/linsolve.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

namespace mtensor {

namespace {

constexpr int kRefinements = 2;
constexpr int kRestarts = 4;

LinearSolveReport solve_direct(const Matrix& M, const Vector& r, double bound) {
  const Eigen::PartialPivLU<Matrix> lu(M);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
    throw LinearSolveError("factorization is singular to working precision (rcond " + std::to_string(lu.rcond()) +
                           ")");
  }
  LinearSolveReport report;
  report.method = LinearMethod::direct;
  report.solution = lu.solve(r);
  Vector residual = M * report.solution - r;
  for (int sweep = 0; sweep < kRefinements && residual.norm() > bound; ++sweep) {
    report.solution -= lu.solve(residual);
    residual = M * report.solution - r;
  }
  report.residual_norm = residual.norm();
  return report;
}

// BiCGSTAB divides by <t, t> after its first half step, which is 0/0 when
// that half step already solves the system. A non-finite iterate therefore
// hands over to GMRES from the last finite iterate.
LinearSolveReport solve_iterative(const Matrix& M, const Vector& r, double bound, const LinearSolverOptions& opt) {
  const int maxit = opt.lin_maxit > 0 ? opt.lin_maxit : 10 * static_cast<int>(M.rows());
  Eigen::BiCGSTAB<Matrix, Eigen::DiagonalPreconditioner<double>> krylov;
  krylov.setTolerance(opt.lin_tol);
  krylov.compute(M);

  LinearSolveReport report;
  report.method = LinearMethod::iterative;
  report.solution = Vector::Zero(r.size());
  double residual = r.norm();
  bool broke_down = false;
  for (int attempt = 0; attempt <= kRestarts && residual > bound && report.iterations < maxit; ++attempt) {
    krylov.setMaxIterations(maxit - report.iterations);
    Vector next = krylov.solveWithGuess(r, report.solution);
    report.iterations += static_cast<int>(krylov.iterations());
    if (!next.allFinite()) {
      broke_down = true;
      break;
    }
    report.solution = std::move(next);
    residual = (M * report.solution - r).norm();
  }
  if (broke_down) {
    Eigen::GMRES<Matrix, Eigen::DiagonalPreconditioner<double>> gmres;
    gmres.setTolerance(opt.lin_tol);
    gmres.setMaxIterations(std::max(maxit - report.iterations, 1));
    gmres.compute(M);
    Vector next = gmres.solveWithGuess(r, report.solution);
    report.iterations += static_cast<int>(gmres.iterations());
    if (!next.allFinite()) throw LinearSolveError("Krylov iteration broke down");
    report.solution = std::move(next);
    residual = (M * report.solution - r).norm();
  }
  report.residual_norm = residual;
  return report;
}

}  // namespace

LinearSolveReport solve_m_system(const Matrix& M, const Vector& r, LinearMethod method,
                                 const LinearSolverOptions& options) {
  if (M.rows() != M.cols()) throw DimensionMismatch("linear system matrix is not square");
  if (r.size() != M.rows()) throw DimensionMismatch("right-hand side does not match matrix dimension");
  const double bound = options.lin_tol * r.norm();
  if (r.size() == 0 || r.norm() == 0.0) {
    return LinearSolveReport{method, 0, 0.0, Vector::Zero(r.size())};
  }
  LinearSolveReport report =
      method == LinearMethod::direct ? solve_direct(M, r, bound) : solve_iterative(M, r, bound, options);
  if (!(report.residual_norm <= bound)) {
    throw LinearSolveError(std::string(method == LinearMethod::direct ? "direct" : "iterative") +
                           " solve missed the residual bound: " + std::to_string(report.residual_norm) + " > " +
                           std::to_string(bound));
  }
  return report;
}

LinearSolveReport solve_m_system(const Matrix& M, const Vector& r, const LinearSolverOptions& options) {
  const auto method = M.rows() < options.direct_threshold ? LinearMethod::direct : LinearMethod::iterative;
  return solve_m_system(M, r, method, options);
}

}  // namespace mtensor
