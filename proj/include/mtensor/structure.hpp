#pragma once

#include <optional>
#include <stdexcept>

#include "mtensor/tensor.hpp"

namespace mtensor {

class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Noise floor used by every positivity test: 1e-12 * (1 + scale).
[[nodiscard]] inline double positivity_floor(double scale) { return 1e-12 * (1.0 + scale); }

/// All off-diagonal entries are non-positive.
[[nodiscard]] bool is_z_tensor(const SquareTensor& A);

/// A = s I - B with B >= 0 and rho_upper = max row sum of B >= rho(B).
/// When certified by row sum, s > rho_upper.
struct MTensorDecomposition {
  double s = 0.0;
  SquareTensor B{3, 1};
  double rho_upper = 0.0;
};

enum class Certification {
  row_sum,       ///< s exceeds the row-sum bound on rho(B)
  witness,       ///< a positive x with A x^{m-1} > 0 was found
  inconclusive,  ///< neither probe succeeded; membership is not disproved
};

struct MTensorSplit {
  MTensorDecomposition decomposition;
  Certification certification = Certification::inconclusive;
  std::optional<Vector> witness;

  [[nodiscard]] bool certified() const noexcept { return certification != Certification::inconclusive; }
};

/// Splits a Z-tensor with s = max diagonal entry and B = s I - A, then tries
/// to certify it as a nonsingular M-tensor: first by the row-sum bound
/// (requiring s > (1 + margin) * rho_upper), then by a positive witness
/// obtained from the all-ones probe or from the fixed point of A x^{m-1} = 1.
///
/// Throws StructureError if A is not a Z-tensor or has a nonpositive
/// diagonal entry.
[[nodiscard]] MTensorSplit mtensor_split(const SquareTensor& A, double margin = 0.0);

/// x > 0 and A x^{m-1} > 0 componentwise.
[[nodiscard]] bool is_m_tensor_witness(const SquareTensor& A, const Vector& x);

/// One Jacobi sweep on the split: ((B x^{m-1} + rhs) / s)^{1/(m-1)}.
[[nodiscard]] Vector jacobi_update(const MTensorDecomposition& split, const Vector& x, const Vector& rhs);

struct MMatrixCertificate {
  Vector witness;
  Vector product;  ///< M * witness
};

[[nodiscard]] bool is_z_matrix(const Matrix& M);

/// Certifies M as a nonsingular M-matrix by a positive witness w with
/// M w > 0. Probes w = 1, then w = M^{-1} 1. An empty result means "not
/// certified", never "disproved".
[[nodiscard]] std::optional<MMatrixCertificate> certify_m_matrix(const Matrix& M);

/// Certification against a caller-supplied witness.
[[nodiscard]] std::optional<MMatrixCertificate> certify_m_matrix(const Matrix& M, const Vector& witness);

}  // namespace mtensor
