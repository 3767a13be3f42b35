#include "doctest.h"
#include "mtensor/generate.hpp"
#include "mtensor/tensor.hpp"
#include "oracles.hpp"

using namespace mtensor;

TEST_CASE("canonicalize accumulates duplicates and drops zeros") {
  SquareTensor A(3, 2);
  A.push({1, 0, 1}, 2.0);
  A.push({0, 0, 0}, 1.0);
  A.push({1, 0, 1}, -2.0);
  A.push({0, 1, 1}, 0.5);
  A.push({0, 1, 1}, 0.25);
  CHECK_FALSE(A.is_canonical());
  A.canonicalize();
  CHECK(A.is_canonical());
  REQUIRE(A.nnz() == 2);
  CHECK(A.at({0, 0, 0}) == 1.0);
  CHECK(A.at({0, 1, 1}) == 0.75);
  CHECK(A.at({1, 0, 1}) == 0.0);
  const auto [lo, hi] = A.row_range(1);
  CHECK(lo == hi);
}

TEST_CASE("from_sorted rejects unsorted data and explicit zeros") {
  CHECK_NOTHROW((void)SquareTensor::from_sorted(3, 2, {0, 0, 0, 1, 1, 1}, {1.0, 2.0}));
  CHECK_THROWS_AS((void)SquareTensor::from_sorted(3, 2, {1, 1, 1, 0, 0, 0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)SquareTensor::from_sorted(3, 2, {0, 0, 0, 1, 1, 1}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)SquareTensor::from_sorted(3, 2, {0, 0, 0, 0, 0, 0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("construction and push validate their arguments") {
  CHECK_THROWS_AS(SquareTensor(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(SquareTensor(3, 0), std::invalid_argument);
  SquareTensor A(3, 2);
  CHECK_THROWS_AS(A.push({0, 2, 0}, 1.0), std::out_of_range);
  CHECK_THROWS_AS(A.push({0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS(A.push({0, 0, 0}, std::nan("")));
}

TEST_CASE("contract_m1 on the order-4 fixture tensor") {
  const SquareTensor A = fixture_tensor();
  CHECK(A.order() == 4);
  CHECK(A.dim() == 2);
  CHECK(A.at({0, 0, 0, 1}) == -2.0);
  const Vector y = contract_m1(A, Vector{{2.0, 1.0}});
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);
  const Vector x{{1.5, 0.7}};
  const Vector z = contract_m1(A, x);
  CHECK(z[0] == doctest::Approx(1.5 * 1.5 * 1.5 - 2 * 1.5 * 1.5 * 0.7));
  CHECK(z[1] == doctest::Approx(0.7 * 0.7 * 0.7));
}

TEST_CASE("identity tensor") {
  const SquareTensor I = identity_tensor(3, 2);
  REQUIRE(I.nnz() == 2);
  CHECK(I.at({0, 0, 0}) == 1.0);
  CHECK(I.at({1, 1, 1}) == 1.0);
  for (int m = 3; m <= 5; ++m) {
    const Vector x = oracle::random_positive(4, 11 + m);
    const Vector y = contract_m1(identity_tensor(m, 4), x);
    for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(std::pow(x[i], m - 1)));
  }
  CHECK(semi_symmetrize(identity_tensor(4, 3)) == identity_tensor(4, 3));
  CHECK(contract_m2(identity_tensor(3, 3), Vector::Ones(3)).isApprox(Matrix::Identity(3, 3)));
}

TEST_CASE("contract_m1 and contract_m2 match nested loops over all tuples") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int m = 3 + static_cast<int>(seed % 3);
    const int n = 2 + static_cast<int>(seed % 4);
    const SquareTensor A = oracle::random_tensor(m, n, 0.4, seed);
    const Vector x = oracle::random_positive(n, seed + 100, -1.0, 1.0);
    CHECK(oracle::rel_diff(contract_m1(A, x), oracle::contract_m1(A, x)) <= 1e-13);
    CHECK(oracle::rel_diff(contract_m2(A, x), oracle::contract_m2(A, x)) <= 1e-13);
  }
  const SquareTensor A = oracle::random_tensor(3, 4, 0.5, 77);
  const Vector x = oracle::random_positive(4, 78);
  CHECK(oracle::rel_diff(contract_m1(A, x), oracle::contract_m1(A, x)) <= 1e-13);
}

TEST_CASE("row kernels agree with the full contraction") {
  const SquareTensor A = oracle::random_tensor(4, 5, 0.3, 5);
  const Vector x = oracle::random_positive(5, 6);
  const Vector full = contract_m1(A, x);
  const std::vector<Index> rows{4, 1, 3};
  const Vector part = contract_m1_rows(A, x, rows);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(part[static_cast<Eigen::Index>(k)] == full[rows[k]]);
    CHECK(contract_row(A, x, rows[k]) == full[rows[k]]);
  }
}

TEST_CASE("contract_m2 on the fixture tensor and at zero") {
  const Matrix M = contract_m2(fixture_tensor(), Vector::Ones(2));
  CHECK(M(0, 0) == -1.0);
  CHECK(M(0, 1) == 0.0);
  CHECK(M(1, 0) == 0.0);
  CHECK(M(1, 1) == 1.0);
  const SquareTensor A = oracle::random_tensor(3, 4, 0.5, 9);
  CHECK(contract_m2(A, Vector::Zero(4)).isZero(0.0));
  CHECK(jacobian(semi_symmetrize(A), Vector::Zero(4)).isZero(0.0));
}

TEST_CASE("dimension mismatches throw") {
  const SquareTensor A = fixture_tensor();
  CHECK_THROWS_AS((void)contract_m1(A, Vector::Ones(3)), DimensionMismatch);
  CHECK_THROWS_AS((void)contract_m2(A, Vector::Ones(1)), DimensionMismatch);
  CHECK_THROWS_AS((void)jacobian(A, Vector::Ones(3)), DimensionMismatch);
}

TEST_CASE("canonical and non-canonical storage contract identically") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int m = 3 + static_cast<int>(seed % 3);
    const SquareTensor raw = oracle::random_tensor(m, 4, 0.4, seed, false);
    const SquareTensor canon = raw.canonicalized();
    const Vector x = oracle::random_positive(4, seed + 1);
    CHECK_FALSE(raw.is_canonical());
    CHECK(contract_m1(raw, x) == contract_m1(canon, x));
    CHECK(contract_m2(raw, x) == contract_m2(canon, x));
    CHECK(raw == canon);
  }
}

TEST_CASE("semi_symmetrize on the fixture tensor") {
  const SquareTensor Abar = semi_symmetrize(fixture_tensor());
  CHECK(Abar.at({0, 0, 0, 1}) == doctest::Approx(-2.0 / 3.0));
  CHECK(Abar.at({0, 0, 1, 0}) == doctest::Approx(-2.0 / 3.0));
  CHECK(Abar.at({0, 1, 0, 0}) == doctest::Approx(-2.0 / 3.0));
  CHECK(Abar.at({0, 0, 0, 0}) == 1.0);
  CHECK(Abar.at({1, 1, 1, 1}) == 1.0);
  CHECK(Abar.nnz() == 5);

  const Matrix J = jacobian(Abar, Vector::Ones(2));
  CHECK(J(0, 0) == doctest::Approx(-1.0));
  CHECK(J(0, 1) == doctest::Approx(-2.0));
  CHECK(J(1, 0) == doctest::Approx(0.0));
  CHECK(J(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("semi_symmetrize matches the full permutation average") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int m = 3 + static_cast<int>(seed % 3);
    const int n = 2 + static_cast<int>(seed % 3);
    const SquareTensor A = oracle::random_tensor(m, n, 0.5, 200 + seed);
    const oracle::Dense expect = oracle::semi_symmetrize(A);
    const oracle::Dense got = oracle::densify(semi_symmetrize(A));
    REQUIRE(got.a.size() == expect.a.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < got.a.size(); ++k) worst = std::max(worst, std::abs(got.a[k] - expect.a[k]));
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("semi_symmetrize is idempotent and preserves A x^{m-1}") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int m = 3 + static_cast<int>(seed % 3);
    const int n = 3 + static_cast<int>(seed % 5);
    const SquareTensor A = oracle::random_tensor(m, n, 0.3, 300 + seed);
    const SquareTensor Abar = semi_symmetrize(A);
    CHECK(semi_symmetrize(Abar) == Abar);
    const Vector x = oracle::random_positive(n, 400 + seed);
    const Vector y = contract_m1(A, x);
    CHECK((contract_m1(Abar, x) - y).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, y.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("jacobian matches central finite differences at random points") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int m = 3 + static_cast<int>(seed % 3);
    const int n = 3 + static_cast<int>(seed % 4);
    const SquareTensor A = oracle::random_tensor(m, n, 0.4, 500 + seed);
    const SquareTensor Abar = semi_symmetrize(A);
    const Vector x = oracle::random_positive(n, 600 + seed);
    const Matrix fd = oracle::fd_jacobian([&](const Vector& v) { return contract_m1(A, v); }, x);
    CHECK(oracle::rel_diff(jacobian(Abar, x), fd) <= 1e-6);
  }
}

TEST_CASE("scaled and max_abs") {
  const SquareTensor A = fixture_tensor();
  CHECK(A.max_abs() == 2.0);
  const SquareTensor B = A.scaled(0.5);
  CHECK(B.at({0, 0, 0, 1}) == -1.0);
  CHECK(B.max_abs() == 1.0);
}
