#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mtensor {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = std::uint32_t;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real m-th order, n-dimensional square tensor in coordinate storage.
///
/// Entries live in a flat index array (m indices per entry, 0-based) next to
/// a value array. Entries may be pushed in any order and may repeat; repeated
/// tuples accumulate. The tensor is canonical when the tuples are strictly
/// increasing in lexicographic order and no stored value is zero. Canonical
/// tensors also carry row offsets so that the entries of a leading index can
/// be visited without a scan.
class SquareTensor {
 public:
  SquareTensor(int order, int dim);

  /// Takes ownership of a flat index list (`values.size() * order` entries).
  /// The result is canonicalized.
  static SquareTensor from_coordinates(int order, int dim, std::vector<Index> indices,
                                       std::vector<double> values);

  /// Same as from_coordinates but for data already in canonical order; the
  /// order is verified in a single pass instead of sorting.
  static SquareTensor from_sorted(int order, int dim, std::vector<Index> indices,
                                  std::vector<double> values);

  void push(std::span<const Index> tuple, double value);
  void push(std::initializer_list<Index> tuple, double value) {
    push(std::span<const Index>(tuple.begin(), tuple.size()), value);
  }

  void canonicalize();
  [[nodiscard]] SquareTensor canonicalized() const;

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t nnz() const noexcept { return values_.size(); }
  [[nodiscard]] bool is_canonical() const noexcept { return canonical_; }

  [[nodiscard]] std::span<const Index> tuple(std::size_t k) const {
    return {indices_.data() + k * static_cast<std::size_t>(order_), static_cast<std::size_t>(order_)};
  }
  [[nodiscard]] double value(std::size_t k) const { return values_[k]; }
  [[nodiscard]] const std::vector<Index>& indices() const noexcept { return indices_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

  /// Half-open entry range whose leading index equals `row`. Canonical only.
  [[nodiscard]] std::pair<std::size_t, std::size_t> row_range(Index row) const;

  /// Entry lookup by tuple; zero when absent. Canonical only.
  [[nodiscard]] double at(std::span<const Index> tuple) const;
  [[nodiscard]] double at(std::initializer_list<Index> tuple) const {
    return at(std::span<const Index>(tuple.begin(), tuple.size()));
  }

  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] SquareTensor scaled(double factor) const;

  /// Logical equality of the represented tensors (canonical forms compared).
  friend bool operator==(const SquareTensor& a, const SquareTensor& b);

 private:
  void build_row_offsets();

  int order_;
  int dim_;
  std::vector<Index> indices_;
  std::vector<double> values_;
  std::vector<std::size_t> row_offsets_;
  bool canonical_ = true;
};

/// The order-m identity tensor: ones on the superdiagonal i1 = ... = im.
[[nodiscard]] SquareTensor identity_tensor(int order, int dim);

/// True when every index of the tuple is the same.
[[nodiscard]] inline bool is_diagonal_tuple(std::span<const Index> tuple) {
  for (std::size_t t = 1; t < tuple.size(); ++t) {
    if (tuple[t] != tuple[0]) return false;
  }
  return true;
}

/// y = A x^{m-1}, y_i = sum a_{i i2..im} x_{i2} ... x_{im}.
[[nodiscard]] Vector contract_m1(const SquareTensor& A, const Vector& x);

/// Rows of A x^{m-1} listed in `rows`, in that order. Canonical A only.
[[nodiscard]] Vector contract_m1_rows(const SquareTensor& A, const Vector& x,
                                      std::span<const Index> rows);

/// Single component (A x^{m-1})_row. Canonical A only.
[[nodiscard]] double contract_row(const SquareTensor& A, const Vector& x, Index row);

/// M = A x^{m-2}, M_ij = sum a_{i j i3..im} x_{i3} ... x_{im}.
[[nodiscard]] Matrix contract_m2(const SquareTensor& A, const Vector& x);

/// Average of A over permutations of modes 2..m.
///
/// Trailing tuples are grouped by their sorted multiset; each group's sum is
/// spread evenly over the distinct arrangements of that multiset, so the cost
/// scales with nonzeros times arrangements rather than (m-1)!.
[[nodiscard]] SquareTensor semi_symmetrize(const SquareTensor& A);

/// (m-1) * Abar x^{m-2}: the Jacobian of x -> Abar x^{m-1} when Abar is
/// semi-symmetric.
[[nodiscard]] Matrix jacobian(const SquareTensor& Abar, const Vector& x);

}  // namespace mtensor
