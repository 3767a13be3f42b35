#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtensor/generate.hpp"
#include "mtensor/npa.hpp"

namespace mtensor {

/// Shape of an approximate solution, with components below 1e-5 counted as
/// zero: sparse has at least n/3 zeros, with_zeros has between 1 and n/3,
/// positive has none, negative has a component below -1e-5.
enum class SolutionClass { sparse, with_zeros, positive, negative };

inline constexpr std::array<SolutionClass, 4> kSolutionClasses = {SolutionClass::sparse, SolutionClass::with_zeros,
                                                                  SolutionClass::positive, SolutionClass::negative};

[[nodiscard]] std::string_view to_string(SolutionClass c);
[[nodiscard]] SolutionClass classify_solution(const Vector& x, double zero_threshold = 1e-5);

struct BenchOptions {
  SolverConfig solver;  ///< audit is forced on
  /// Starting point with every component equal to this value; bootstrap when unset.
  std::optional<double> x0_fill;
  double success_threshold = 1e-5;
};

struct BenchRow {
  std::uint64_t seed = 0;
  int m = 0;
  int n = 0;
  std::string status;
  int iterations = 0;
  double re_err = 0.0;
  double wall_seconds = 0.0;
  bool success = false;
  std::optional<SolutionClass> solution_class;
  std::vector<std::string> violations;
};

/// Solves one instance with the invariant audit on. A failing audit marks the
/// row "invariant-violated". A successful row has ReErr below the success
/// threshold and no violation.
[[nodiscard]] BenchRow bench_instance(const ProblemInstance& inst, const BenchOptions& options,
                                      SolveReport* report = nullptr);

struct BenchSummary {
  std::vector<BenchRow> rows;  ///< sorted by seed
  double success_rate = 0.0;
  std::array<double, 4> class_rates{};  ///< over successful rows, indexed like kSolutionClasses
  int invariant_violations = 0;
  double mean_iterations = 0.0;
  double mean_wall_seconds = 0.0;
};

[[nodiscard]] BenchSummary summarize(std::vector<BenchRow> rows);

[[nodiscard]] nlohmann::json summary_to_json(const BenchSummary& summary);

/// `seed,m,n,status,iterations,ReErr,wall_seconds,success,solution_class`.
void write_summary_csv(std::ostream& out, const BenchSummary& summary);

}  // namespace mtensor
