#include "mtensor/npa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "mtensor/structure.hpp"

namespace mtensor {

namespace {

Vector gather(const Vector& v, std::span<const Index> rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = v[rows[r]];
  return out;
}

std::vector<Index> zero_set(const Vector& F, const Vector& x, double eps) {
  std::vector<Index> J;
  for (Eigen::Index i = 0; i < F.size(); ++i) {
    if (F[i] <= eps && x[i] <= eps) J.push_back(static_cast<Index>(i));
  }
  return J;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw std::invalid_argument("delta1 must lie in (0, 1)");
  if (!(delta2 > 0.0 && delta2 < 1.0)) throw std::invalid_argument("delta2 must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (p_max < 1 || q_max < 1) throw std::invalid_argument("backtracking caps must be positive");
  if (eps_active && !(*eps_active >= 0.0)) throw std::invalid_argument("eps_active must be nonnegative");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iter:
      return "maxiter";
    case SolveStatus::backtrack_failure:
      return "backtrack-failure";
    case SolveStatus::bootstrap_failure:
      return "bootstrap-failure";
    case SolveStatus::linear_solve_failure:
      return "linear-solve-failure";
    case SolveStatus::stagnated:
      return "stagnated";
    case SolveStatus::invariant_violated:
      return "invariant-violated";
  }
  return "unknown";
}

ScaledProblem scale_problem(const SquareTensor& A, const Vector& b) {
  if (b.size() != A.dim()) throw DimensionMismatch("right-hand side does not match tensor dimension");
  const double kappa = std::max(A.max_abs(), b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  if (!(kappa > 0.0)) throw std::invalid_argument("cannot scale an all-zero problem");
  return ScaledProblem{A.canonicalized().scaled(1.0 / kappa), b / kappa, kappa};
}

Vector residual(const SquareTensor& A, const Vector& b, const Vector& x) {
  if (b.size() != A.dim()) throw DimensionMismatch("right-hand side does not match tensor dimension");
  return contract_m1(A, x) - b;
}

std::optional<ActivePartition> classify(const Vector& F, const Vector& x, double eps_active) {
  if (F.size() != x.size()) throw DimensionMismatch("residual and iterate sizes differ");
  ActivePartition part;
  std::vector<Index> positive;
  for (Eigen::Index i = 0; i < F.size(); ++i) {
    const auto idx = static_cast<Index>(i);
    if (F[i] <= eps_active) {
      part.Ibar.push_back(idx);
      if (x[i] <= eps_active) part.J.push_back(idx);
    } else {
      positive.push_back(idx);
    }
  }
  if (positive.empty()) return std::nullopt;
  part.j = positive.front();
  for (Index i : positive) {
    if (F[i] > F[part.j]) part.j = i;
  }
  for (Index i : positive) {
    if (i != part.j) part.I.push_back(i);
  }
  return part;
}

CoordinateStep coordinate_step(const SquareTensor& A, const Vector& b, const Vector& x, Index j, double delta1,
                               int p_max, double eps_active) {
  if (!A.is_canonical()) return coordinate_step(A.canonicalized(), b, x, j, delta1, p_max, eps_active);
  if (j >= static_cast<Index>(A.dim())) throw std::out_of_range("coordinate index out of range");
  Vector trial = x;
  double shrink = 1.0;
  for (int p = 0; p <= p_max; ++p, shrink *= delta1) {
    trial[j] = x[j] + shrink * -x[j];
    const double g = contract_row(A, trial, j) - b[j];
    if (g >= -eps_active) return CoordinateStep{trial[j], p};
  }
  throw BacktrackFailure("coordinate backtracking on index " + std::to_string(j) + " exceeded p_max = " +
                         std::to_string(p_max));
}

NewtonStep newton_step(const SquareTensor& A, const SquareTensor& Abar, const Vector& b, const Vector& x,
                       const Vector& F, const ActivePartition& partition, const SolverConfig& cfg,
                       double eps_active) {
  NewtonStep step;
  const auto& I = partition.I;
  if (I.empty()) {
    step.q = -1;
    return step;
  }
  if (!A.is_canonical()) return newton_step(A.canonicalized(), Abar, b, x, F, partition, cfg, eps_active);

  const std::vector<Eigen::Index> rows(I.begin(), I.end());
  step.reduced_jacobian = jacobian(Abar, x)(rows, rows);
  step.linear = solve_m_system(step.reduced_jacobian, gather(F, I), cfg.linear);
  step.direction = -step.linear.solution;

  const Vector x_I = gather(x, I);
  const Vector b_I = gather(b, I);
  Vector trial = x;
  double shrink = 1.0;
  for (int q = 0; q <= cfg.q_max; ++q, shrink *= cfg.delta2) {
    const Vector candidate = x_I + shrink * step.direction;
    if ((candidate.array() < 0.0).any()) continue;
    for (std::size_t r = 0; r < I.size(); ++r) trial[I[r]] = candidate[static_cast<Eigen::Index>(r)];
    const Vector G = contract_m1_rows(A, trial, I) - b_I;
    if ((G.array() >= -eps_active).all()) {
      step.x_I = candidate;
      step.q = q;
      return step;
    }
  }
  throw BacktrackFailure("Newton backtracking exceeded q_max = " + std::to_string(cfg.q_max));
}

SolveReport solve(const SquareTensor& A, const Vector& b, const std::optional<Vector>& x0, const SolverConfig& cfg) {
  cfg.validate();
  if (b.size() != A.dim()) throw DimensionMismatch("right-hand side does not match tensor dimension");
  if (!b.allFinite() || (b.array() < 0.0).any()) throw std::invalid_argument("right-hand side must be nonnegative");
  if (x0 && x0->size() != A.dim()) throw DimensionMismatch("starting point does not match tensor dimension");

  const auto started = std::chrono::steady_clock::now();
  SolveReport report;
  const auto finish = [&](SolveStatus status, std::string message = {}) {
    report.status = status;
    report.message = std::move(message);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
  };

  const ScaledProblem problem = cfg.scale ? scale_problem(A, b) : ScaledProblem{A.canonicalized(), b, 1.0};
  const SquareTensor& As = problem.A;
  const Vector& bs = problem.b;
  report.kappa = problem.kappa;

  std::optional<MTensorSplit> split;
  try {
    split = mtensor_split(As);
  } catch (const StructureError&) {
    if (!cfg.skip_certification) throw;
  }
  if (!cfg.skip_certification && !split->certified()) {
    throw StructureError("tensor could not be certified as a nonsingular M-tensor");
  }

  const double eps = cfg.eps_active.value_or(1e-12 * (1.0 + (bs.size() > 0 ? bs.cwiseAbs().maxCoeff() : 0.0)));
  report.eps_active = eps;

  Vector x;
  if (x0 && is_feasible_start(As, bs, *x0, eps)) {
    x = *x0;
  } else {
    try {
      if (!split) throw BootstrapError("no M-tensor split available for the bootstrap");
      StartPoint start = make_start(As, split->decomposition, bs, x0, eps, cfg.bootstrap);
      x = std::move(start.x);
      report.bootstrapped = start.bootstrapped;
    } catch (const BootstrapError& e) {
      report.x = x0.value_or(Vector::Zero(A.dim()));
      return finish(SolveStatus::bootstrap_failure, e.what());
    }
  }

  const SquareTensor Abar = semi_symmetrize(As);
  Vector previous_x;
  std::vector<Index> previous_J;

  for (int k = 0;; ++k) {
    const Vector F = residual(As, bs, x);
    const double re_err = F.norm();
    const auto partition = classify(F, x, eps);

    IterationRecord record;
    record.iter = k;
    record.x_norm = x.norm();
    record.re_err = re_err;
    if (partition) {
      record.j = static_cast<int>(partition->j);
      record.card_I = static_cast<int>(partition->I.size());
      record.card_Ibar = static_cast<int>(partition->Ibar.size());
      record.card_J = static_cast<int>(partition->J.size());
    } else {
      record.card_Ibar = static_cast<int>(F.size());
      record.card_J = static_cast<int>(zero_set(F, x, eps).size());
    }
    report.x = x;
    report.re_err = re_err;
    report.iterations = k;

    if (cfg.audit) {
      const std::vector<Index> J = partition ? partition->J : zero_set(F, x, eps);
      if ((F.array() < -eps).any()) {
        report.violations.push_back("iteration " + std::to_string(k) + ": F(x) < -eps_active");
      }
      if (k > 0) {
        if ((x.array() < 0.0).any() || (x.array() > previous_x.array() + eps).any()) {
          report.violations.push_back("iteration " + std::to_string(k) + ": iterate is not monotone");
        }
        if (!std::includes(J.begin(), J.end(), previous_J.begin(), previous_J.end())) {
          report.violations.push_back("iteration " + std::to_string(k) + ": zero set shrank");
        }
      }
      previous_J = J;
      if (!report.violations.empty()) {
        report.trace.push_back(record);
        return finish(SolveStatus::invariant_violated, report.violations.front());
      }
    }

    if (re_err <= cfg.tol) {
      report.trace.push_back(record);
      return finish(SolveStatus::converged);
    }
    if (!partition) {
      report.trace.push_back(record);
      return finish(SolveStatus::stagnated, "all residuals are inside the zero band");
    }
    if (k >= cfg.max_iter) {
      report.trace.push_back(record);
      return finish(SolveStatus::max_iter);
    }

    CoordinateStep coord;
    NewtonStep newton;
    try {
      coord = coordinate_step(As, bs, x, partition->j, cfg.delta1, cfg.p_max, eps);
      newton = newton_step(As, Abar, bs, x, F, *partition, cfg, eps);
    } catch (const BacktrackFailure& e) {
      report.trace.push_back(record);
      return finish(SolveStatus::backtrack_failure, e.what());
    } catch (const LinearSolveError& e) {
      report.trace.push_back(record);
      return finish(SolveStatus::linear_solve_failure, e.what());
    }
    record.p = coord.p;
    record.q = newton.q;
    report.trace.push_back(record);

    if (cfg.audit && !partition->I.empty() &&
        !certify_m_matrix(newton.reduced_jacobian, gather(x, partition->I))) {
      report.violations.push_back("iteration " + std::to_string(k) + ": reduced Jacobian not certified");
      return finish(SolveStatus::invariant_violated, report.violations.front());
    }

    previous_x = x;
    x[partition->j] = coord.x_j;
    for (std::size_t r = 0; r < partition->I.size(); ++r) {
      x[partition->I[r]] = newton.x_I[static_cast<Eigen::Index>(r)];
    }
  }
}

}  // namespace mtensor
