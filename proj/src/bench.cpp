#include "mtensor/bench.hpp"

#include <algorithm>
#include <ostream>

#include "mtensor/io.hpp"

namespace mtensor {

std::string_view to_string(SolutionClass c) {
  switch (c) {
    case SolutionClass::sparse:
      return "nonnegative-sparse";
    case SolutionClass::with_zeros:
      return "nonnegative-with-zeros";
    case SolutionClass::positive:
      return "fully-positive";
    case SolutionClass::negative:
      return "negative";
  }
  return "unknown";
}

SolutionClass classify_solution(const Vector& x, double zero_threshold) {
  if ((x.array() < -zero_threshold).any()) return SolutionClass::negative;
  const auto zeros = (x.array() < zero_threshold).count();
  if (zeros == 0) return SolutionClass::positive;
  if (3 * zeros >= x.size()) return SolutionClass::sparse;
  return SolutionClass::with_zeros;
}

BenchRow bench_instance(const ProblemInstance& inst, const BenchOptions& options, SolveReport* report) {
  SolverConfig cfg = options.solver;
  cfg.audit = true;
  std::optional<Vector> x0;
  if (options.x0_fill) x0 = Vector::Constant(inst.A.dim(), *options.x0_fill);

  BenchRow row;
  row.seed = inst.seed;
  row.m = inst.A.order();
  row.n = inst.A.dim();
  SolveReport result;
  try {
    result = solve(inst.A, inst.b, x0, cfg);
  } catch (const std::exception& e) {
    row.status = "error";
    row.violations.push_back(e.what());
    return row;
  }
  row.status = std::string(to_string(result.status));
  row.iterations = result.iterations;
  row.re_err = result.re_err;
  row.wall_seconds = result.wall_seconds;
  row.violations = result.violations;
  row.success = result.status != SolveStatus::invariant_violated && result.re_err < options.success_threshold;
  if (row.success) row.solution_class = classify_solution(result.x, 1e-5);
  if (report) *report = std::move(result);
  return row;
}

BenchSummary summarize(std::vector<BenchRow> rows) {
  BenchSummary summary;
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return a.seed < b.seed; });
  summary.rows = std::move(rows);
  if (summary.rows.empty()) return summary;

  int successes = 0;
  std::array<int, 4> counts{};
  for (const auto& row : summary.rows) {
    if (row.status == "invariant-violated") ++summary.invariant_violations;
    summary.mean_iterations += row.iterations;
    summary.mean_wall_seconds += row.wall_seconds;
    if (!row.success) continue;
    ++successes;
    ++counts[static_cast<std::size_t>(*row.solution_class)];
  }
  const auto total = static_cast<double>(summary.rows.size());
  summary.success_rate = successes / total;
  summary.mean_iterations /= total;
  summary.mean_wall_seconds /= total;
  if (successes > 0) {
    for (std::size_t c = 0; c < counts.size(); ++c) summary.class_rates[c] = counts[c] / static_cast<double>(successes);
  }
  return summary;
}

nlohmann::json summary_to_json(const BenchSummary& summary) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : summary.rows) {
    rows.push_back({{"seed", row.seed},
                    {"m", row.m},
                    {"n", row.n},
                    {"status", row.status},
                    {"iterations", row.iterations},
                    {"ReErr", row.re_err},
                    {"wall_seconds", row.wall_seconds},
                    {"success", row.success},
                    {"solution_class", row.solution_class ? nlohmann::json(std::string(to_string(*row.solution_class)))
                                                          : nlohmann::json(nullptr)},
                    {"violations", row.violations}});
  }
  nlohmann::json classes = nlohmann::json::object();
  for (std::size_t c = 0; c < kSolutionClasses.size(); ++c) {
    classes[std::string(to_string(kSolutionClasses[c]))] = summary.class_rates[c];
  }
  return {{"format", kFormatVersion},
          {"instances", summary.rows.size()},
          {"success_rate", summary.success_rate},
          {"failure_rate", summary.rows.empty() ? 0.0 : 1.0 - summary.success_rate},
          {"solution_classes", std::move(classes)},
          {"invariant_violations", summary.invariant_violations},
          {"mean_iterations", summary.mean_iterations},
          {"mean_wall_seconds", summary.mean_wall_seconds},
          {"rows", std::move(rows)}};
}

void write_summary_csv(std::ostream& out, const BenchSummary& summary) {
  out << "seed,m,n,status,iterations,ReErr,wall_seconds,success,solution_class\n";
  for (const auto& row : summary.rows) {
    out << row.seed << ',' << row.m << ',' << row.n << ',' << row.status << ',' << row.iterations << ','
        << format_real(row.re_err) << ',' << format_real(row.wall_seconds) << ',' << (row.success ? 1 : 0) << ','
        << (row.solution_class ? to_string(*row.solution_class) : std::string_view{}) << '\n';
  }
}

}  // namespace mtensor
