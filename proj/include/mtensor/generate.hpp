#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtensor/tensor.hpp"

namespace mtensor {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A multilinear system A x^{m-1} = b with b >= 0.
struct ProblemInstance {
  SquareTensor A{3, 1};
  Vector b;
  std::optional<Vector> planted;  ///< a known nonnegative solution, when one was built in
  std::uint64_t seed = 0;
  std::string recipe;
  int redraws = 0;  ///< rejected draws before this instance was accepted
};

/// A = s I - B with B a random nonnegative tensor and s = (1 + omega) * max
/// row sum of B.
///
/// Every one of the n^m tuples of B is visited in lexicographic order: one
/// uniform draw decides whether it is zero (probability zero_fraction), a
/// second supplies its value in (0, 1). An all-zero B is re-drawn from
/// seed + 1, seed + 2, ... (100 attempts); if every attempt is zero the result
/// is (1 + omega) I.
[[nodiscard]] SquareTensor gen_random_mtensor(int m, int n, double zero_fraction, double omega, std::uint64_t seed);

/// Random M-tensor with a planted sparse nonnegative solution.
///
/// Draws the support S of x* (each index with probability
/// solution_density), then B as in gen_random_mtensor except that rows
/// outside S carry no entry whose trailing indices all lie in S. Those
/// entries would make b negative off the support. x* restricted to S is the
/// positive solution of the principal subsystem A_SS y^{m-1} = c with c
/// uniform in (0, 1), and b = A x*^{m-1}, which is positive on S and exactly
/// zero off S. Draws with a negative b component are rejected (budget 100).
[[nodiscard]] ProblemInstance gen_planted_instance(int m, int n, double zero_fraction, double solution_density,
                                                   double omega, std::uint64_t seed);

/// Random M-tensor (gen_random_mtensor with the same seed) and a sparse
/// right-hand side: b_i is uniform in (0, 1) with probability rhs_density and
/// zero otherwise. No planted solution.
[[nodiscard]] ProblemInstance gen_sparse_rhs_instance(int m, int n, double zero_fraction, double rhs_density,
                                                      double omega, std::uint64_t seed);

/// Names accepted by named_fixture.
[[nodiscard]] std::vector<std::string> fixture_names();

/// The order-4, dimension-2 system with a_1111 = a_2222 = 1, a_1112 = -2
/// (1-based), paired with b = (0, 1), (0, 8) or (8, 0).
[[nodiscard]] ProblemInstance named_fixture(std::string_view name);

/// All nonnegative solutions of a fixture, in lexicographic order.
[[nodiscard]] std::vector<Vector> fixture_solutions(std::string_view name);

/// The tensor shared by every fixture.
[[nodiscard]] SquareTensor fixture_tensor();

}  // namespace mtensor
