#include "mtensor/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mtensor {

namespace {

constexpr int kWitnessSweeps = 2000;

double root(double y, int degree) {
  switch (degree) {
    case 2:
      return std::sqrt(y);
    case 3:
      return std::cbrt(y);
    default:
      return std::pow(y, 1.0 / degree);
  }
}

bool all_positive(const Vector& v, double floor) {
  return (v.array() > floor).all();
}

std::optional<MMatrixCertificate> check_witness(const Matrix& M, const Vector& w, double floor) {
  if (!w.allFinite() || !(w.array() > 0.0).all()) return std::nullopt;
  Vector product = M * w;
  if (!all_positive(product, floor)) return std::nullopt;
  return MMatrixCertificate{w, std::move(product)};
}

}  // namespace

bool is_z_tensor(const SquareTensor& A) {
  const SquareTensor C = A.canonicalized();
  for (std::size_t k = 0; k < C.nnz(); ++k) {
    if (C.value(k) > 0.0 && !is_diagonal_tuple(C.tuple(k))) return false;
  }
  return true;
}

Vector jacobi_update(const MTensorDecomposition& split, const Vector& x, const Vector& rhs) {
  Vector y = (contract_m1(split.B, x) + rhs) / split.s;
  const int degree = split.B.order() - 1;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0) throw std::domain_error("Jacobi sweep produced a negative power sum");
    y[i] = root(y[i], degree);
  }
  return y;
}

bool is_m_tensor_witness(const SquareTensor& A, const Vector& x) {
  if (x.size() != A.dim()) throw DimensionMismatch("witness size does not match tensor dimension");
  if (!x.allFinite() || !(x.array() > 0.0).all()) return false;
  const Vector y = contract_m1(A, x);
  return y.allFinite() && all_positive(y, positivity_floor(A.max_abs()));
}

MTensorSplit mtensor_split(const SquareTensor& A, double margin) {
  const SquareTensor C = A.canonicalized();
  const int n = C.dim();
  const int m = C.order();
  if (!is_z_tensor(C)) throw StructureError("tensor has a positive off-diagonal entry");

  Vector diag = Vector::Zero(n);
  for (std::size_t k = 0; k < C.nnz(); ++k) {
    const auto t = C.tuple(k);
    if (is_diagonal_tuple(t)) diag[t[0]] = C.value(k);
  }
  for (int i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) throw StructureError("diagonal entry " + std::to_string(i) + " is not positive");
  }
  const double s = diag.maxCoeff();

  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(C.indices().size());
  val.reserve(C.nnz());
  Vector row_sums = Vector::Zero(n);
  for (std::size_t k = 0; k < C.nnz(); ++k) {
    const auto t = C.tuple(k);
    const double b = is_diagonal_tuple(t) ? s - C.value(k) : -C.value(k);
    if (b == 0.0) continue;
    idx.insert(idx.end(), t.begin(), t.end());
    val.push_back(b);
    row_sums[t[0]] += b;
  }

  MTensorSplit result;
  result.decomposition.s = s;
  result.decomposition.B = SquareTensor::from_sorted(m, n, std::move(idx), std::move(val));
  result.decomposition.rho_upper = row_sums.maxCoeff();
  if (s > (1.0 + margin) * result.decomposition.rho_upper) {
    result.certification = Certification::row_sum;
    return result;
  }

  Vector probe = Vector::Ones(n);
  if (is_m_tensor_witness(C, probe)) {
    result.certification = Certification::witness;
    result.witness = probe;
    return result;
  }

  // Fixed point of A x^{m-1} = 1; the Jacobi sweeps increase monotonically
  // from below and stay bounded exactly when a positive solution exists.
  const Vector ones = Vector::Ones(n);
  probe = Vector::Constant(n, root(1.0 / s, m - 1));
  for (int sweep = 0; sweep < kWitnessSweeps; ++sweep) {
    Vector next = jacobi_update(result.decomposition, probe, ones);
    if (!next.allFinite() || next.maxCoeff() > 1e150) break;
    const double change = (next - probe).cwiseAbs().maxCoeff();
    probe = std::move(next);
    if (change <= 1e-13 * probe.maxCoeff()) break;
  }
  if (probe.allFinite() && is_m_tensor_witness(C, probe)) {
    result.certification = Certification::witness;
    result.witness = probe;
  }
  return result;
}

bool is_z_matrix(const Matrix& M) {
  if (M.rows() != M.cols()) return false;
  const double floor = positivity_floor(M.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (i != j && M(i, j) > floor) return false;
    }
  }
  return true;
}

std::optional<MMatrixCertificate> certify_m_matrix(const Matrix& M) {
  if (M.rows() != M.cols() || !is_z_matrix(M)) return std::nullopt;
  if (M.rows() == 0) return MMatrixCertificate{Vector(), Vector()};
  if (!(M.diagonal().array() > 0.0).all()) return std::nullopt;
  const double floor = positivity_floor(M.cwiseAbs().maxCoeff());
  const Vector ones = Vector::Ones(M.rows());
  if (auto cert = check_witness(M, ones, floor)) return cert;

  const Eigen::PartialPivLU<Matrix> lu(M);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) return std::nullopt;
  return check_witness(M, lu.solve(ones), floor);
}

std::optional<MMatrixCertificate> certify_m_matrix(const Matrix& M, const Vector& witness) {
  if (M.rows() != M.cols() || !is_z_matrix(M)) return std::nullopt;
  if (witness.size() != M.rows()) throw DimensionMismatch("witness size does not match matrix dimension");
  return check_witness(M, witness, positivity_floor(M.cwiseAbs().maxCoeff()));
}

}  // namespace mtensor
