#include "mtensor/generate.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "mtensor/bootstrap.hpp"
#include "mtensor/rng.hpp"
#include "mtensor/structure.hpp"

namespace mtensor {

namespace {

constexpr int kAttempts = 100;

struct SparseDraw {
  std::vector<Index> indices;
  std::vector<double> values;
  std::vector<double> row_sums;
};

void check_recipe(int m, int n, double zero_fraction, double omega) {
  if (m < 3) throw std::invalid_argument("order must be at least 3");
  if (n < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!(zero_fraction >= 0.0 && zero_fraction < 1.0)) throw std::invalid_argument("zero fraction must lie in [0, 1)");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
}

// Bernoulli-masked uniform tensor over all n^m tuples in lexicographic order.
// `keep(tuple)` may veto a drawn entry; the draws are consumed either way so
// the stream does not depend on the mask.
SparseDraw draw_nonnegative(Xoshiro256& rng, int m, int n, double zero_fraction,
                            const std::function<bool(std::span<const Index>)>& keep) {
  SparseDraw draw;
  draw.row_sums.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<Index> tuple(static_cast<std::size_t>(m), 0);
  for (;;) {
    const bool nonzero = rng.uniform01() >= zero_fraction;
    if (nonzero) {
      const double value = rng.uniform01();
      if (!keep || keep(tuple)) {
        draw.indices.insert(draw.indices.end(), tuple.begin(), tuple.end());
        draw.values.push_back(value);
        draw.row_sums[tuple[0]] += value;
      }
    }
    int pos = m - 1;
    while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == static_cast<Index>(n)) {
      tuple[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return draw;
}

// s I - B, with B given in canonical order.
SquareTensor compose(int m, int n, const SparseDraw& B, double s) {
  const auto mm = static_cast<std::size_t>(m);
  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(B.indices.size() + mm * static_cast<std::size_t>(n));
  val.reserve(B.values.size() + static_cast<std::size_t>(n));
  std::vector<Index> diag(mm);
  std::size_t k = 0;
  const std::size_t nnz = B.values.size();
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    std::fill(diag.begin(), diag.end(), i);
    bool diag_done = false;
    const auto emit_diag = [&](double b_ii) {
      idx.insert(idx.end(), diag.begin(), diag.end());
      val.push_back(s - b_ii);
      diag_done = true;
    };
    for (; k < nnz && B.indices[k * mm] == i; ++k) {
      const auto first = B.indices.begin() + static_cast<std::ptrdiff_t>(k * mm);
      const std::span<const Index> t(&*first, mm);
      if (!diag_done && std::ranges::equal(t, diag)) {
        emit_diag(B.values[k]);
        continue;
      }
      if (!diag_done && std::lexicographical_compare(diag.begin(), diag.end(), t.begin(), t.end())) emit_diag(0.0);
      idx.insert(idx.end(), t.begin(), t.end());
      val.push_back(-B.values[k]);
    }
    if (!diag_done) emit_diag(0.0);
  }
  return SquareTensor::from_sorted(m, n, std::move(idx), std::move(val));
}

SquareTensor principal_subtensor(const SquareTensor& A, const std::vector<Index>& support) {
  std::vector<long> position(static_cast<std::size_t>(A.dim()), -1);
  for (std::size_t r = 0; r < support.size(); ++r) position[support[r]] = static_cast<long>(r);
  std::vector<Index> idx;
  std::vector<double> val;
  for (std::size_t k = 0; k < A.nnz(); ++k) {
    const auto t = A.tuple(k);
    if (std::ranges::any_of(t, [&](Index i) { return position[i] < 0; })) continue;
    for (Index i : t) idx.push_back(static_cast<Index>(position[i]));
    val.push_back(A.value(k));
  }
  return SquareTensor::from_sorted(A.order(), static_cast<int>(support.size()), std::move(idx), std::move(val));
}

double max_row_sum(const SparseDraw& draw) {
  return *std::max_element(draw.row_sums.begin(), draw.row_sums.end());
}

}  // namespace

SquareTensor gen_random_mtensor(int m, int n, double zero_fraction, double omega, std::uint64_t seed) {
  check_recipe(m, n, zero_fraction, omega);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Xoshiro256 rng(seed + static_cast<std::uint64_t>(attempt));
    const SparseDraw B = draw_nonnegative(rng, m, n, zero_fraction, {});
    const double row_max = max_row_sum(B);
    if (row_max > 0.0) return compose(m, n, B, (1.0 + omega) * row_max);
  }
  return identity_tensor(m, n).scaled(1.0 + omega);
}

ProblemInstance gen_planted_instance(int m, int n, double zero_fraction, double solution_density, double omega,
                                     std::uint64_t seed) {
  check_recipe(m, n, zero_fraction, omega);
  if (!(solution_density > 0.0 && solution_density <= 1.0)) {
    throw std::invalid_argument("solution density must lie in (0, 1]");
  }
  ProblemInstance inst;
  inst.seed = seed;
  inst.recipe = "planted";
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Xoshiro256 rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<char> in_support(static_cast<std::size_t>(n), 0);
    std::vector<Index> support;
    for (int i = 0; i < n; ++i) {
      if (rng.uniform01() < solution_density) {
        in_support[static_cast<std::size_t>(i)] = 1;
        support.push_back(static_cast<Index>(i));
      }
    }
    const auto keep = [&](std::span<const Index> t) {
      if (in_support[t[0]]) return true;
      return !std::all_of(t.begin() + 1, t.end(), [&](Index i) { return in_support[i] != 0; });
    };
    const SparseDraw B = draw_nonnegative(rng, m, n, zero_fraction, keep);
    const double row_max = max_row_sum(B);
    if (!(row_max > 0.0)) {
      ++inst.redraws;
      continue;
    }
    inst.A = compose(m, n, B, (1.0 + omega) * row_max);

    Vector x = Vector::Zero(n);
    if (!support.empty()) {
      Vector c(static_cast<Eigen::Index>(support.size()));
      for (Eigen::Index r = 0; r < c.size(); ++r) c[r] = rng.uniform01();
      const SquareTensor sub = principal_subtensor(inst.A, support);
      BootstrapConfig inner;
      inner.inner_tol = 1e-14;
      inner.inner_maxit = 100000;
      const Vector y = solve_positive(sub, c, inner).x;
      for (std::size_t r = 0; r < support.size(); ++r) x[support[r]] = y[static_cast<Eigen::Index>(r)];
    }
    Vector b = contract_m1(inst.A, x);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (b[i] == 0.0) b[i] = 0.0;  // drop the sign of -0.0
    }
    if ((b.array() < 0.0).any()) {
      ++inst.redraws;
      continue;
    }
    inst.b = std::move(b);
    inst.planted = std::move(x);
    return inst;
  }
  throw GenerationError("planted instance rejected " + std::to_string(kAttempts) + " times");
}

ProblemInstance gen_sparse_rhs_instance(int m, int n, double zero_fraction, double rhs_density, double omega,
                                        std::uint64_t seed) {
  check_recipe(m, n, zero_fraction, omega);
  if (!(rhs_density >= 0.0 && rhs_density <= 1.0)) throw std::invalid_argument("rhs density must lie in [0, 1]");
  ProblemInstance inst;
  inst.seed = seed;
  inst.recipe = "sparse-rhs";
  inst.A = gen_random_mtensor(m, n, zero_fraction, omega, seed);
  Xoshiro256 rng(~seed);
  inst.b = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (rng.uniform01() < rhs_density) inst.b[i] = rng.uniform01();
  }
  return inst;
}

std::vector<std::string> fixture_names() { return {"example1-b01", "example2-i", "example2-ii"}; }

SquareTensor fixture_tensor() {
  SquareTensor A(4, 2);
  A.push({0, 0, 0, 0}, 1.0);
  A.push({1, 1, 1, 1}, 1.0);
  A.push({0, 0, 0, 1}, -2.0);
  A.canonicalize();
  return A;
}

ProblemInstance named_fixture(std::string_view name) {
  ProblemInstance inst;
  inst.A = fixture_tensor();
  inst.recipe = "fixture:" + std::string(name);
  if (name == "example1-b01") {
    inst.b = Vector{{0.0, 1.0}};
  } else if (name == "example2-i") {
    inst.b = Vector{{0.0, 8.0}};
  } else if (name == "example2-ii") {
    inst.b = Vector{{8.0, 0.0}};
  } else {
    throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
  }
  return inst;
}

std::vector<Vector> fixture_solutions(std::string_view name) {
  if (name == "example1-b01") return {Vector{{0.0, 1.0}}, Vector{{2.0, 1.0}}};
  if (name == "example2-i") return {Vector{{0.0, 2.0}}, Vector{{4.0, 2.0}}};
  if (name == "example2-ii") return {Vector{{2.0, 0.0}}};
  throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

}  // namespace mtensor
