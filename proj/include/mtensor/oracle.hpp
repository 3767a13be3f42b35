#pragma once

#include <vector>

#include "mtensor/tensor.hpp"

namespace mtensor {

/// Brute-force enumeration of the nonnegative solutions of A x^{m-1} = b for
/// n <= 3.
///
/// Every point of a uniform grid over [0, box_hi]^n (grid_points per axis,
/// both ends included) seeds a damped Newton polish: minimum-norm
/// least-squares steps, halved until ||F|| decreases, each iterate projected
/// onto the nonnegative orthant. Limits with ||F||_2 <= polish_tol are kept,
/// merged when closer than 1e-6, and returned in lexicographic order.
[[nodiscard]] std::vector<Vector> enumerate_nonneg_solutions(const SquareTensor& A, const Vector& b, double box_hi,
                                                             int grid_points, double polish_tol);

}  // namespace mtensor
