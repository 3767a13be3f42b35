#include "mtensor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mtensor {

namespace {

void check_shape(int order, int dim) {
  if (order < 3) throw std::invalid_argument("tensor order must be at least 3, got " + std::to_string(order));
  if (dim < 1) throw std::invalid_argument("tensor dimension must be at least 1, got " + std::to_string(dim));
}

void check_vector(const SquareTensor& A, const Vector& x) {
  if (x.size() != A.dim()) {
    throw DimensionMismatch("vector of size " + std::to_string(x.size()) + " does not match tensor dimension " +
                            std::to_string(A.dim()));
  }
}

// n^m when it fits in 64 bits, otherwise 0.
std::uint64_t key_space(int order, int dim) {
  std::uint64_t space = 1;
  for (int t = 0; t < order; ++t) {
    if (space > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(dim)) return 0;
    space *= static_cast<std::uint64_t>(dim);
  }
  return space;
}

std::uint64_t pack(std::span<const Index> tuple, std::uint64_t dim) {
  std::uint64_t key = 0;
  for (Index i : tuple) key = key * dim + i;
  return key;
}

// Permutation of [0, count) that orders the tuples of `flat` lexicographically;
// equal tuples keep their original relative order.
std::vector<std::size_t> lexicographic_order(const std::vector<Index>& flat, std::size_t count, int order,
                                             int dim) {
  const auto m = static_cast<std::size_t>(order);
  std::vector<std::size_t> perm(count);
  if (key_space(order, dim) != 0) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed(count);
    for (std::size_t k = 0; k < count; ++k) {
      keyed[k] = {pack({flat.data() + k * m, m}, static_cast<std::uint64_t>(dim)), k};
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < count; ++k) perm[k] = keyed[k].second;
  } else {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(flat.begin() + a * m, flat.begin() + (a + 1) * m, flat.begin() + b * m,
                                          flat.begin() + (b + 1) * m);
    });
  }
  return perm;
}

bool same_tuple(const std::vector<Index>& flat, std::size_t a, std::size_t b, std::size_t m) {
  return std::equal(flat.begin() + a * m, flat.begin() + (a + 1) * m, flat.begin() + b * m);
}

}  // namespace

SquareTensor::SquareTensor(int order, int dim) : order_(order), dim_(dim) {
  check_shape(order, dim);
  row_offsets_.assign(static_cast<std::size_t>(dim) + 1, 0);
}

SquareTensor SquareTensor::from_coordinates(int order, int dim, std::vector<Index> indices,
                                            std::vector<double> values) {
  SquareTensor t(order, dim);
  if (indices.size() != values.size() * static_cast<std::size_t>(order)) {
    throw std::invalid_argument("index list length does not match entry count times order");
  }
  for (Index i : indices) {
    if (i >= static_cast<Index>(dim)) throw std::out_of_range("tensor index out of range");
  }
  t.indices_ = std::move(indices);
  t.values_ = std::move(values);
  t.canonical_ = false;
  t.canonicalize();
  return t;
}

SquareTensor SquareTensor::from_sorted(int order, int dim, std::vector<Index> indices, std::vector<double> values) {
  SquareTensor t(order, dim);
  const auto m = static_cast<std::size_t>(order);
  if (indices.size() != values.size() * m) {
    throw std::invalid_argument("index list length does not match entry count times order");
  }
  for (Index i : indices) {
    if (i >= static_cast<Index>(dim)) throw std::out_of_range("tensor index out of range");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == 0.0) throw std::invalid_argument("explicit zero in sorted tensor data");
    if (k > 0 && !std::lexicographical_compare(indices.begin() + (k - 1) * m, indices.begin() + k * m,
                                               indices.begin() + k * m, indices.begin() + (k + 1) * m)) {
      throw std::invalid_argument("tensor data is not strictly increasing");
    }
  }
  t.indices_ = std::move(indices);
  t.values_ = std::move(values);
  t.build_row_offsets();
  return t;
}

void SquareTensor::push(std::span<const Index> tuple, double value) {
  if (tuple.size() != static_cast<std::size_t>(order_)) {
    throw std::invalid_argument("tuple has " + std::to_string(tuple.size()) + " indices, tensor order is " +
                                std::to_string(order_));
  }
  for (Index i : tuple) {
    if (i >= static_cast<Index>(dim_)) throw std::out_of_range("tensor index out of range");
  }
  if (!std::isfinite(value)) throw std::invalid_argument("tensor entries must be finite");
  indices_.insert(indices_.end(), tuple.begin(), tuple.end());
  values_.push_back(value);
  canonical_ = false;
}

void SquareTensor::canonicalize() {
  if (canonical_) return;
  const auto m = static_cast<std::size_t>(order_);
  const std::size_t count = values_.size();
  const auto perm = lexicographic_order(indices_, count, order_, dim_);

  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(indices_.size());
  val.reserve(count);
  for (std::size_t a = 0; a < count;) {
    double sum = values_[perm[a]];
    std::size_t b = a + 1;
    while (b < count && same_tuple(indices_, perm[a], perm[b], m)) sum += values_[perm[b++]];
    if (sum != 0.0) {
      idx.insert(idx.end(), indices_.begin() + perm[a] * m, indices_.begin() + (perm[a] + 1) * m);
      val.push_back(sum);
    }
    a = b;
  }
  indices_ = std::move(idx);
  values_ = std::move(val);
  build_row_offsets();
}

SquareTensor SquareTensor::canonicalized() const {
  SquareTensor copy = *this;
  copy.canonicalize();
  return copy;
}

void SquareTensor::build_row_offsets() {
  const auto m = static_cast<std::size_t>(order_);
  row_offsets_.assign(static_cast<std::size_t>(dim_) + 1, 0);
  for (std::size_t k = 0; k < values_.size(); ++k) ++row_offsets_[indices_[k * m] + 1];
  std::partial_sum(row_offsets_.begin(), row_offsets_.end(), row_offsets_.begin());
  canonical_ = true;
}

std::pair<std::size_t, std::size_t> SquareTensor::row_range(Index row) const {
  if (!canonical_) throw std::logic_error("row_range requires a canonical tensor");
  if (row >= static_cast<Index>(dim_)) throw std::out_of_range("row out of range");
  return {row_offsets_[row], row_offsets_[row + 1]};
}

double SquareTensor::at(std::span<const Index> tuple) const {
  if (tuple.size() != static_cast<std::size_t>(order_)) throw std::invalid_argument("tuple length mismatch");
  auto [lo, hi] = row_range(tuple[0]);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto t = this->tuple(mid);
    if (std::lexicographical_compare(t.begin(), t.end(), tuple.begin(), tuple.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < row_offsets_[tuple[0] + 1] && std::ranges::equal(this->tuple(lo), tuple)) return values_[lo];
  return 0.0;
}

double SquareTensor::max_abs() const noexcept {
  if (!canonical_) return canonicalized().max_abs();
  double best = 0.0;
  for (double v : values_) best = std::max(best, std::abs(v));
  return best;
}

SquareTensor SquareTensor::scaled(double factor) const {
  SquareTensor copy = *this;
  for (double& v : copy.values_) v *= factor;
  if (copy.canonical_ && std::ranges::any_of(copy.values_, [](double v) { return v == 0.0; })) {
    copy.canonical_ = false;
    copy.canonicalize();
  }
  return copy;
}

bool operator==(const SquareTensor& a, const SquareTensor& b) {
  if (a.order_ != b.order_ || a.dim_ != b.dim_) return false;
  if (!a.canonical_ || !b.canonical_) return a.canonicalized() == b.canonicalized();
  return a.indices_ == b.indices_ && a.values_ == b.values_;
}

SquareTensor identity_tensor(int order, int dim) {
  check_shape(order, dim);
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(order) * static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) idx.insert(idx.end(), static_cast<std::size_t>(order), static_cast<Index>(i));
  return SquareTensor::from_sorted(order, dim, std::move(idx), std::vector<double>(static_cast<std::size_t>(dim), 1.0));
}

// The m == 3 branches are the generic loop unrolled; both multiply in the
// same order so the results are identical.

Vector contract_m1(const SquareTensor& A, const Vector& x) {
  check_vector(A, x);
  if (!A.is_canonical()) return contract_m1(A.canonicalized(), x);
  Vector y = Vector::Zero(A.dim());
  const Index* idx = A.indices().data();
  const double* val = A.values().data();
  const std::size_t nnz = A.nnz();
  if (A.order() == 3) {
    for (std::size_t k = 0; k < nnz; ++k, idx += 3) y[idx[0]] += val[k] * x[idx[1]] * x[idx[2]];
    return y;
  }
  const auto m = static_cast<std::size_t>(A.order());
  for (std::size_t k = 0; k < nnz; ++k, idx += m) {
    double prod = val[k];
    for (std::size_t t = 1; t < m; ++t) prod *= x[idx[t]];
    y[idx[0]] += prod;
  }
  return y;
}

double contract_row(const SquareTensor& A, const Vector& x, Index row) {
  check_vector(A, x);
  const auto [lo, hi] = A.row_range(row);
  const auto m = static_cast<std::size_t>(A.order());
  const Index* idx = A.indices().data() + lo * m;
  const double* val = A.values().data();
  double sum = 0.0;
  if (m == 3) {
    for (std::size_t k = lo; k < hi; ++k, idx += 3) sum += val[k] * x[idx[1]] * x[idx[2]];
    return sum;
  }
  for (std::size_t k = lo; k < hi; ++k, idx += m) {
    double prod = val[k];
    for (std::size_t t = 1; t < m; ++t) prod *= x[idx[t]];
    sum += prod;
  }
  return sum;
}

Vector contract_m1_rows(const SquareTensor& A, const Vector& x, std::span<const Index> rows) {
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y[static_cast<Eigen::Index>(r)] = contract_row(A, x, rows[r]);
  return y;
}

Matrix contract_m2(const SquareTensor& A, const Vector& x) {
  check_vector(A, x);
  if (!A.is_canonical()) return contract_m2(A.canonicalized(), x);
  Matrix M = Matrix::Zero(A.dim(), A.dim());
  const Index* idx = A.indices().data();
  const double* val = A.values().data();
  const std::size_t nnz = A.nnz();
  if (A.order() == 3) {
    for (std::size_t k = 0; k < nnz; ++k, idx += 3) M(idx[0], idx[1]) += val[k] * x[idx[2]];
    return M;
  }
  const auto m = static_cast<std::size_t>(A.order());
  for (std::size_t k = 0; k < nnz; ++k, idx += m) {
    double prod = val[k];
    for (std::size_t t = 2; t < m; ++t) prod *= x[idx[t]];
    M(idx[0], idx[1]) += prod;
  }
  return M;
}

SquareTensor semi_symmetrize(const SquareTensor& A) {
  const SquareTensor C = A.canonicalized();
  const auto m = static_cast<std::size_t>(C.order());
  const std::size_t nnz = C.nnz();

  // Leading index followed by the sorted trailing multiset.
  std::vector<Index> groups(C.indices());
  for (std::size_t k = 0; k < nnz; ++k) std::sort(groups.begin() + k * m + 1, groups.begin() + (k + 1) * m);
  const auto perm = lexicographic_order(groups, nnz, C.order(), C.dim());

  std::vector<Index> out_idx;
  std::vector<double> out_val;
  out_idx.reserve(C.indices().size() * 2);
  out_val.reserve(nnz * 2);
  std::vector<Index> arrangements;
  for (std::size_t a = 0; a < nnz;) {
    std::size_t b = a + 1;
    while (b < nnz && same_tuple(groups, perm[a], perm[b], m)) ++b;

    const auto first = groups.begin() + perm[a] * m;
    std::vector<Index> trailing(first + 1, first + m);
    arrangements.clear();
    std::size_t count = 0;
    do {
      arrangements.insert(arrangements.end(), trailing.begin(), trailing.end());
      ++count;
    } while (std::next_permutation(trailing.begin(), trailing.end()));

    double sum = 0.0;
    bool uniform = (b - a) == count;
    for (std::size_t g = a; g < b; ++g) {
      sum += C.value(perm[g]);
      uniform = uniform && C.value(perm[g]) == C.value(perm[a]);
    }
    // A group that is already symmetric is copied verbatim so the operation
    // is exactly idempotent.
    const double mean = uniform ? C.value(perm[a]) : sum / static_cast<double>(count);
    if (mean != 0.0) {
      for (std::size_t r = 0; r < count; ++r) {
        out_idx.push_back(*first);
        out_idx.insert(out_idx.end(), arrangements.begin() + r * (m - 1), arrangements.begin() + (r + 1) * (m - 1));
        out_val.push_back(mean);
      }
    }
    a = b;
  }
  return SquareTensor::from_coordinates(C.order(), C.dim(), std::move(out_idx), std::move(out_val));
}

Matrix jacobian(const SquareTensor& Abar, const Vector& x) {
  return static_cast<double>(Abar.order() - 1) * contract_m2(Abar, x);
}

}  // namespace mtensor
