#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "metaviz/geometry.hpp"

using namespace metaviz;

namespace {

Matrix random_points(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  return m;
}

// Independent oracle: plain double loop over all pairs and coordinates.
Matrix brute_force_distances(const Matrix& x) {
  const Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Index c = 0; c < x.cols(); ++c) {
        acc += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      }
      d(i, j) = std::sqrt(acc);
    }
  }
  return d;
}

Matrix rotation2d(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace

TEST_CASE("distance row on the 3-4-5 triangle") {
  Matrix pts(2, 2);
  pts << 0, 0, 3, 4;
  const Embedding e("tri", pts);
  const Vector row = distance_row(e, 0);
  CHECK(row(0) == 0.0);
  CHECK(row(1) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("distance row is symmetric and zero on the diagonal") {
  const Embedding e("r", random_points(9, 2, 11));
  for (Index i = 0; i < e.n(); ++i) {
    const Vector row_i = distance_row(e, i);
    CHECK(row_i(i) == 0.0);
    for (Index j = 0; j < e.n(); ++j) {
      CHECK(row_i(j) == distance_row(e, j)(i));
    }
  }
  CHECK_THROWS_AS(distance_row(e, 9), Error);
  CHECK_THROWS_AS(distance_row(e, -1), Error);
}

TEST_CASE("distance rows match the brute-force oracle within 1e-14") {
  const Matrix pts = random_points(5, 2, 12);
  const Embedding e("o", pts);
  const Matrix oracle = brute_force_distances(pts);
  for (Index i = 0; i < 5; ++i) {
    const Vector row = distance_row(e, i);
    for (Index j = 0; j < 5; ++j) {
      CHECK(row(j) == doctest::Approx(oracle(i, j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("normalize_row scales to unit norm") {
  Vector row(3);
  row << 0, 3, 4;
  const NormalizedDistanceRow norm = normalize_row(row, 0);
  CHECK(norm.values()(1) == doctest::Approx(0.6));
  CHECK(norm.values()(2) == doctest::Approx(0.8));
  CHECK_FALSE(norm.degenerate());
}

TEST_CASE("normalize_row flags all-zero rows as degenerate") {
  const NormalizedDistanceRow norm = normalize_row(Vector::Zero(4), 2);
  CHECK(norm.degenerate());
  CHECK(norm.values().norm() == 0.0);
}

TEST_CASE("normalize_row hand case (0,1,1,1)") {
  Vector row(4);
  row << 0, 1, 1, 1;
  const NormalizedDistanceRow norm = normalize_row(row, 0);
  const double expected = 1.0 / std::sqrt(3.0);
  for (Index j = 1; j < 4; ++j) {
    CHECK(norm.values()(j) == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK(std::abs(norm.values().norm() - 1.0) < 1e-15);
}

TEST_CASE("normalize_row rejects bad input") {
  Vector negative(3);
  negative << 0, -1, 2;
  CHECK_THROWS_AS(normalize_row(negative, 0), Error);
  Vector nan_row(3);
  nan_row << 0, std::nan(""), 2;
  CHECK_THROWS_AS(normalize_row(nan_row, 0), Error);
}

TEST_CASE("normalized rows are invariant to similarity transforms") {
  const Matrix pts = random_points(20, 2, 13);
  const Embedding base("base", pts);

  Matrix transformed = pts * rotation2d(1.234).transpose();
  transformed *= 7.0;
  transformed.rowwise() += Eigen::RowVector2d(3.0, -2.0);
  transformed.col(0) = -transformed.col(0);  // reflection
  const Embedding moved("moved", transformed);

  for (Index i = 0; i < base.n(); ++i) {
    const Vector a = normalized_distance_row(base, i).values();
    const Vector b = normalized_distance_row(moved, i).values();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("full matrix row equals streaming row exactly") {
  const Embedding e("s", random_points(50, 2, 14));
  const Matrix full = full_normalized_matrix(e);
  DistanceRowStream stream(e);
  Index count = 0;
  while (auto row = stream.next()) {
    CHECK(row->sample() == count);
    // bit-identical: same expression, same order
    CHECK((full.row(count).transpose() - row->values()).cwiseAbs().maxCoeff() ==
          0.0);
    ++count;
  }
  CHECK(count == e.n());
}

TEST_CASE("tiny full matrix") {
  Matrix pts(2, 2);
  pts << 0, 0, 1, 0;
  const Matrix full = full_normalized_matrix(Embedding("two", pts));
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  CHECK((full - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("permuting samples permutes rows and columns") {
  const Matrix pts = random_points(12, 2, 15);
  const Embedding e("p", pts);
  std::vector<Index> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(16));

  Matrix permuted(12, 2);
  for (Index i = 0; i < 12; ++i) permuted.row(perm[static_cast<size_t>(i)]) = pts.row(i);
  const Embedding pe("pp", permuted);

  const Matrix full = full_normalized_matrix(e);
  const Matrix pfull = full_normalized_matrix(pe);
  for (Index i = 0; i < 12; ++i) {
    for (Index j = 0; j < 12; ++j) {
      CHECK(pfull(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) ==
            doctest::Approx(full(i, j)).epsilon(1e-15));
    }
  }
}

TEST_CASE("coincident points produce a degenerate row, not NaN") {
  Matrix pts(3, 2);
  pts << 1, 1, 1, 1, 1, 1;
  const Embedding e("dup", pts);
  for (Index i = 0; i < 3; ++i) {
    const NormalizedDistanceRow row = normalized_distance_row(e, i);
    CHECK(row.degenerate());
    CHECK(row.values().allFinite());
  }
}

TEST_CASE("property: non-degenerate rows have unit norm and zero self entry") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + static_cast<Index>(rng() % 30);
    const Embedding e("t", random_points(n, 1 + rng() % 4, rng()));
    for (Index i = 0; i < n; ++i) {
      const NormalizedDistanceRow row = normalized_distance_row(e, i);
      CHECK(row.values()(i) == 0.0);
      if (!row.degenerate()) {
        CHECK(std::abs(row.values().norm() - 1.0) < 1e-12);
      }
    }
  }
}
