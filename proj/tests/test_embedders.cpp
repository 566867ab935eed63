#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "metaviz/embedders.hpp"
#include "metaviz/fusion.hpp"
#include "metaviz/geometry.hpp"
#include "metaviz/metrics.hpp"
#include "metaviz/pipeline.hpp"
#include "metaviz/simulation.hpp"

using namespace metaviz;

namespace {

Matrix random_matrix(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = normal(rng);
  return m;
}

}  // namespace

TEST_CASE("pca on 2-D centered data preserves pairwise distances") {
  Matrix pts = random_matrix(30, 2, 1);
  pts.rowwise() -= pts.colwise().mean();
  const Embedding e = pca_embed(pts, 2);
  const Matrix before = raw_distance_matrix(pts);
  const Matrix after = raw_distance_matrix(e.coords());
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pca on identical rows is all zero with a rank warning") {
  Matrix pts = Matrix::Zero(10, 3);
  pts.rowwise() += Eigen::RowVector3d(1.0, 2.0, 3.0);
  EmbedInfo info;
  const Embedding e = pca_embed(pts, 2, &info);
  CHECK(info.rank_deficient);
  CHECK(e.coords().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pca energy equals top singular values squared") {
  const Matrix data = random_matrix(40, 10, 2);
  const Embedding e = pca_embed(data, 2);
  Matrix centered = data.rowwise() - data.colwise().mean();
  Eigen::BDCSVD<Matrix> svd(centered);
  const double expected = svd.singularValues()(0) * svd.singularValues()(0) +
                          svd.singularValues()(1) * svd.singularValues()(1);
  CHECK(e.coords().squaredNorm() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("classical mds recovers the 3-4-5 triangle") {
  Matrix d(3, 3);
  d << 0, 3, 4,
       3, 0, 5,
       4, 5, 0;
  const Embedding e = classical_mds_from_distance(d, 2);
  const Matrix recovered = raw_distance_matrix(e.coords());
  CHECK((recovered - d).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("classical mds of all zeros puts every point at the origin") {
  const Embedding e = classical_mds_from_distance(Matrix::Zero(5, 5), 2);
  CHECK(e.coords().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("classical mds self-consistency on planar points") {
  const Matrix pts = random_matrix(25, 2, 3);
  const Matrix d = raw_distance_matrix(pts);
  const Embedding e = classical_mds_from_distance(d, 2);
  const Matrix recovered = raw_distance_matrix(e.coords());
  CHECK((recovered - d).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("classical mds input validation") {
  Matrix asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(classical_mds_from_distance(asym, 2), Error);
  Matrix negative(2, 2);
  negative << 0, -1, -1, 0;
  CHECK_THROWS_AS(classical_mds_from_distance(negative, 2), Error);
}

TEST_CASE("kpca with huge sigma collapses toward zero") {
  const Matrix pts = random_matrix(20, 2, 4);
  const Matrix d = raw_distance_matrix(pts);
  const double sigma = 1e9 * d.maxCoeff();
  const Embedding e = gaussian_kpca_from_distance(d, sigma, 2);
  CHECK(e.coords().cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("kpca separates two well-separated blocks") {
  // two clusters: within-distance 0.1, across-distance 10
  const Index n = 20;
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = 0.0;
      } else if ((i < 10) == (j < 10)) {
        d(i, j) = 0.1;
      } else {
        d(i, j) = 10.0;
      }
    }
  }
  const Embedding e = gaussian_kpca_from_distance(d, 3.0, 2);
  double min_gap = 1e18;
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 10; j < n; ++j) {
      min_gap = std::min(min_gap, std::abs(e.coords()(i, 0) - e.coords()(j, 0)));
    }
  }
  CHECK(min_gap > 0.0);
}

TEST_CASE("kpca matches a dense eigendecomposition oracle") {
  const Matrix pts = random_matrix(20, 3, 5);
  const Matrix d = raw_distance_matrix(pts);
  const double sigma = 1.7;
  const Embedding e = gaussian_kpca_from_distance(d, sigma, 2);

  Matrix kernel = (-d.cwiseProduct(d) / (2.0 * sigma * sigma)).array().exp();
  const Index n = d.rows();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  const Matrix centered = j * kernel * j;
  Eigen::SelfAdjointEigenSolver<Matrix> es(centered);
  for (Index c = 0; c < 2; ++c) {
    const double lambda = es.eigenvalues()(n - 1 - c);
    Vector expected = es.eigenvectors().col(n - 1 - c) * std::sqrt(lambda);
    // align signs before comparing
    if ((expected - e.coords().col(c)).norm() >
        (expected + e.coords().col(c)).norm()) {
      expected = -expected;
    }
    CHECK((e.coords().col(c) - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("kpca rejects non-positive sigma") {
  const Matrix d = raw_distance_matrix(random_matrix(5, 2, 6));
  CHECK_THROWS_AS(gaussian_kpca_from_distance(d, 0.0, 2), Error);
  CHECK_THROWS_AS(gaussian_kpca_from_distance(d, -1.0, 2), Error);
}

TEST_CASE("kpca with median sigma is invariant to distance scale") {
  const Matrix pts = random_matrix(15, 2, 7);
  const Matrix d = raw_distance_matrix(pts);
  const Embedding a =
      gaussian_kpca_from_distance(d, median_heuristic_sigma(d), 2);
  const Matrix d2 = 37.0 * d;
  const Embedding b =
      gaussian_kpca_from_distance(d2, median_heuristic_sigma(d2), 2);
  CHECK((a.coords() - b.coords()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("laplacian eigenmap orders a path graph monotonically") {
  const Index n = 10;
  Matrix pts(n, 1);
  for (Index i = 0; i < n; ++i) pts(i, 0) = static_cast<double>(i);
  const Matrix d = raw_distance_matrix(pts);
  EmbedInfo info;
  const Embedding e = laplacian_eigenmap_from_distance(d, 2, 1, &info);
  CHECK_FALSE(info.disconnected);
  // Fiedler coordinate must be strictly monotone along the path
  const Vector fiedler = e.coords().col(0);
  const double direction = fiedler(1) - fiedler(0) > 0 ? 1.0 : -1.0;
  for (Index i = 1; i < n; ++i) {
    CHECK(direction * (fiedler(i) - fiedler(i - 1)) > 0.0);
  }
}

TEST_CASE("laplacian eigenmap flags a disconnected graph") {
  // two far clusters, knn=1 keeps them separate
  Matrix pts(6, 1);
  pts << 0.0, 0.1, 0.2, 100.0, 100.1, 100.2;
  const Matrix d = raw_distance_matrix(pts);
  EmbedInfo info;
  const Embedding e = laplacian_eigenmap_from_distance(d, 1, 2, &info);
  CHECK(info.disconnected);
  CHECK(info.components == 2);
  // members of the skipped component sit at the origin
  bool has_origin = false;
  for (Index i = 0; i < 6; ++i) {
    if (e.coords().row(i).norm() == 0.0) has_origin = true;
  }
  CHECK(has_origin);
}

TEST_CASE("laplacian eigenmap on the complete graph has a flat spectrum") {
  // equidistant points: knn = n-1 gives the complete graph; all nonzero
  // normalized-Laplacian eigenvalues equal n/(n-1)
  const Index n = 6;
  Matrix d = Matrix::Constant(n, n, 1.0);
  d.diagonal().setZero();
  EmbedInfo info;
  laplacian_eigenmap_from_distance(d, n - 1, 2, &info);
  REQUIRE(info.eigenvalues.size() == static_cast<size_t>(n));
  CHECK(info.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-10));
  const double expected = static_cast<double>(n) / (n - 1.0);
  for (size_t j = 1; j < info.eigenvalues.size(); ++j) {
    CHECK(info.eigenvalues[j] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("laplacian eigenmap validates knn") {
  const Matrix d = raw_distance_matrix(random_matrix(5, 2, 8));
  CHECK_THROWS_AS(laplacian_eigenmap_from_distance(d, 0, 2), Error);
  CHECK_THROWS_AS(laplacian_eigenmap_from_distance(d, 5, 2), Error);
}

TEST_CASE("random projection determinism and seed sensitivity") {
  const Matrix data = random_matrix(30, 8, 9);
  const Embedding a = random_projection_embed(data, 2, 42);
  const Embedding b = random_projection_embed(data, 2, 42);
  const Embedding c = random_projection_embed(data, 2, 43);
  CHECK((a.coords() - b.coords()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.coords() - c.coords()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("random projection preserves expected squared norms at dim = p") {
  // Johnson-Lindenstrauss sanity: E |x G|^2 = |x|^2; with dim = p the
  // average over 100 gaussian rows should land within 20%.
  const Index p = 40;
  const Matrix data = random_matrix(100, p, 10);
  const Embedding e = random_projection_embed(data, p, 11);
  const double ratio = e.coords().squaredNorm() / data.squaredNorm();
  CHECK(ratio > 0.8);
  CHECK(ratio < 1.2);
}

TEST_CASE("meta_embed on a single-candidate set is self-consistent") {
  const Matrix pts = random_matrix(25, 2, 12);
  std::vector<Embedding> pool;
  pool.emplace_back("only", pts);
  const CandidateSet set(std::move(pool));
  const AssessCombineResult result = assess_and_combine(set);

  EmbedderConfig cfg;
  cfg.method = EmbedMethod::ClassicalMds;
  EmbedInfo info;
  const Embedding embedded = meta_embed(result.meta, cfg, &info);
  CHECK(info.auto_symmetrized);

  // the embedding's normalized distances must agree with the candidate's
  const Matrix a = full_normalized_matrix(embedded);
  const Matrix b = full_normalized_matrix(set.candidate(0));
  double acc = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    acc += a.row(i).dot(b.row(i));
  }
  CHECK(acc / static_cast<double>(a.rows()) >= 0.999);
}

TEST_CASE("meta_embed rejects data-side methods") {
  Matrix rows(3, 3);
  rows << 0, 1, 2,
          1, 0, 1,
          2, 1, 0;
  const MetaDistance meta(rows, true);
  EmbedderConfig cfg;
  cfg.method = EmbedMethod::Pca;
  CHECK_THROWS_AS(meta_embed(meta, cfg), Error);
  cfg.method = EmbedMethod::RandomProjection;
  CHECK_THROWS_AS(meta_embed(meta, cfg), Error);
}

TEST_CASE("embedders are deterministic across repeated calls") {
  const Matrix data = random_matrix(30, 6, 13);
  const Matrix d = raw_distance_matrix(data);
  CHECK((pca_embed(data, 2).coords() - pca_embed(data, 2).coords())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((classical_mds_from_distance(d, 2).coords() -
         classical_mds_from_distance(d, 2).coords())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((laplacian_eigenmap_from_distance(d, 5, 2).coords() -
         laplacian_eigenmap_from_distance(d, 5, 2).coords())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("diverse_candidates returns the requested count with unique names") {
  const Matrix data = random_matrix(40, 10, 14);
  const auto pool = diverse_candidates(data, 9, 1);
  CHECK(pool.size() == 9);
  const CandidateSet set(pool);  // validates unique names, equal n
  CHECK(set.n() == 40);
}
