#include "mtensor/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace mtensor {

namespace {

constexpr int kPolishSteps = 200;
constexpr int kHalvings = 40;
constexpr double kMergeDistance = 1e-6;

Vector polish(const SquareTensor& A, const SquareTensor& Abar, const Vector& b, Vector x) {
  for (int step = 0; step < kPolishSteps; ++step) {
    const Vector F = contract_m1(A, x) - b;
    const double norm = F.norm();
    if (norm == 0.0) break;
    const Vector dx = jacobian(Abar, x).completeOrthogonalDecomposition().solve(-F);
    double t = 1.0;
    bool accepted = false;
    Vector trial;
    for (int h = 0; h < kHalvings; ++h, t *= 0.5) {
      trial = (x + t * dx).cwiseMax(0.0);
      if ((contract_m1(A, trial) - b).norm() < norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double moved = (trial - x).norm();
    x = std::move(trial);
    if (moved <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

}  // namespace

std::vector<Vector> enumerate_nonneg_solutions(const SquareTensor& A, const Vector& b, double box_hi,
                                               int grid_points, double polish_tol) {
  const int n = A.dim();
  if (n > 3) throw std::invalid_argument("solution enumeration is limited to n <= 3");
  if (b.size() != n) throw DimensionMismatch("right-hand side does not match tensor dimension");
  if (grid_points < 2 || !(box_hi > 0.0)) throw std::invalid_argument("grid needs at least two points and a positive box");

  const SquareTensor C = A.canonicalized();
  const SquareTensor Abar = semi_symmetrize(C);
  std::vector<Vector> found;

  std::vector<int> cell(static_cast<std::size_t>(n), 0);
  const double spacing = box_hi / (grid_points - 1);
  for (;;) {
    Vector seed(n);
    for (int i = 0; i < n; ++i) seed[i] = spacing * cell[static_cast<std::size_t>(i)];
    const Vector x = polish(C, Abar, b, seed);
    if ((contract_m1(C, x) - b).norm() <= polish_tol && (x.array() >= -polish_tol).all()) found.push_back(x);

    int pos = n - 1;
    while (pos >= 0 && ++cell[static_cast<std::size_t>(pos)] == grid_points) cell[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }

  const auto lex = [](const Vector& u, const Vector& v) {
    return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end());
  };
  std::sort(found.begin(), found.end(), lex);
  std::vector<Vector> unique;
  for (const Vector& x : found) {
    const bool seen = std::any_of(unique.begin(), unique.end(),
                                  [&](const Vector& u) { return (u - x).norm() <= kMergeDistance; });
    if (!seen) unique.push_back(x);
  }
  return unique;
}

}  // namespace mtensor
