#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "metaviz/fusion.hpp"
#include "metaviz/geometry.hpp"
#include "metaviz/simulation.hpp"
#include "metaviz/spectral.hpp"

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

NormalizedDistanceRow make_row(Index sample, const Vector& values,
                               bool degenerate = false) {
  return NormalizedDistanceRow(sample, values, degenerate);
}

Matrix rotation2d(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace

TEST_CASE("gram of identical unit rows is all ones") {
  Vector v(4);
  v << 0, 1, 1, 1;
  const Vector unit = v / v.norm();
  std::vector<NormalizedDistanceRow> rows{make_row(0, unit), make_row(0, unit),
                                          make_row(0, unit)};
  const GramMatrix g = gram_matrix(rows);
  CHECK((g.entries() - Matrix::Constant(3, 3, 1.0)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("gram of disjoint-support rows is the identity") {
  Vector a(3), b(3);
  a << 0, 1, 0;
  b << 0, 0, 1;
  std::vector<NormalizedDistanceRow> rows{make_row(0, a), make_row(0, b)};
  const GramMatrix g = gram_matrix(rows);
  CHECK((g.entries() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram hand case sqrt(1/2)") {
  Vector a(3), b(3);
  a << 0, 1, 0;
  b << 0, std::sqrt(0.5), std::sqrt(0.5);
  std::vector<NormalizedDistanceRow> rows{make_row(0, a), make_row(0, b)};
  const GramMatrix g = gram_matrix(rows);
  CHECK(g.entries()(0, 1) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(g.entries()(1, 0) == g.entries()(0, 1));
}

TEST_CASE("gram rejects mixed samples and lengths") {
  Vector a(3), b(4);
  a << 0, 1, 0;
  b << 0, 1, 0, 0;
  CHECK_THROWS_AS(gram_matrix({make_row(0, a), make_row(1, a)}), Error);
  CHECK_THROWS_AS(gram_matrix({make_row(0, a), make_row(0, b)}), Error);
}

TEST_CASE("leading eigenpair of the all-ones matrix") {
  const Matrix g = Matrix::Constant(3, 3, 1.0);
  const LeadingEigenpair pair = leading_eigenpair(g);
  CHECK(pair.eigenvalue == doctest::Approx(3.0).epsilon(1e-12));
  const double expected = 1.0 / std::sqrt(3.0);
  for (Index j = 0; j < 3; ++j) {
    CHECK(pair.vector(j) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(pair.report.converged);
  CHECK(pair.report.residual <= 1e-10 * std::max(pair.eigenvalue, 1.0));
}

TEST_CASE("leading eigenpair 2x2 closed form") {
  Matrix g(2, 2);
  g << 1.0, 0.5, 0.5, 1.0;
  const LeadingEigenpair pair = leading_eigenpair(g);
  CHECK(pair.eigenvalue == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(pair.vector(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(pair.vector(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
}

TEST_CASE("identity gram: degenerate gap, uniform tie-break") {
  const Matrix g = Matrix::Identity(4, 4);
  const LeadingEigenpair pair = leading_eigenpair(g);
  CHECK(pair.eigenvalue == doctest::Approx(1.0));
  CHECK(pair.report.degenerate_gap);
  for (Index j = 0; j < 4; ++j) {
    CHECK(pair.vector(j) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("perron positivity for strictly positive gram matrices") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index k = 2 + static_cast<Index>(rng() % 7);
    // random unit rows with strictly positive entries -> positive Gram
    Matrix rows(k, 6);
    for (Index a = 0; a < k; ++a) {
      for (Index j = 0; j < 6; ++j) rows(a, j) = unit(rng);
      rows.row(a) /= rows.row(a).norm();
    }
    const Matrix g = gram_from_rows(rows);
    const LeadingEigenpair pair = leading_eigenpair(g);
    if (!pair.report.degenerate_gap) {
      CHECK(pair.vector.minCoeff() > 0.0);
    }
  }
}

TEST_CASE("leading eigenpair matches a dense solver on random PSD input") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index k = 1 + static_cast<Index>(rng() % 8);
    Matrix half(k, k + 2);
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k + 2; ++j) half(i, j) = normal(rng);
    const Matrix g = half * half.transpose();
    const LeadingEigenpair pair = leading_eigenpair(g);

    Eigen::SelfAdjointEigenSolver<Matrix> oracle(g);
    const double expected = oracle.eigenvalues().maxCoeff();
    CHECK(pair.eigenvalue ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK((g * pair.vector - pair.eigenvalue * pair.vector).norm() <=
          1e-8 * std::max(1.0, expected));
  }
}

TEST_CASE("eigenscores: single candidate scores 1") {
  Matrix g = Matrix::Constant(1, 1, 1.0);
  const Vector s = eigenscores_from_gram(g);
  CHECK(s.size() == 1);
  CHECK(s(0) == doctest::Approx(1.0));
}

TEST_CASE("eigenscores: identical candidates score uniformly") {
  const Embedding base("b", random_points(40, 2, 23));
  std::vector<Embedding> pool;
  pool.emplace_back("one", base.coords());
  pool.emplace_back("two", base.coords() * 3.5);
  pool.emplace_back("three", base.coords() * rotation2d(0.7).transpose());
  const CandidateSet set(std::move(pool));
  const EigenscoreMatrix scores = eigenscore_matrix(set);
  const double expected = 1.0 / std::sqrt(3.0);
  for (Index i = 0; i < scores.n(); ++i) {
    for (Index k = 0; k < 3; ++k) {
      CHECK(scores.scores()(i, k) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("all-degenerate sample falls back to uniform scores") {
  Matrix g = Matrix::Zero(4, 4);
  EigenSolveReport report;
  const Vector s = eigenscores_from_gram(g, &report);
  CHECK(report.uniform_fallback);
  for (Index j = 0; j < 4; ++j) {
    CHECK(s(j) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("degenerate candidate gets score zero by Perron structure") {
  Vector a(3), zero3 = Vector::Zero(3);
  a << 0, 0.6, 0.8;
  std::vector<NormalizedDistanceRow> rows{make_row(0, a), make_row(0, a),
                                          make_row(0, zero3, true)};
  const GramMatrix g = gram_matrix(rows);
  const Vector s = eigenscores_for_sample(g);
  CHECK(s(2) == 0.0);
  CHECK(s(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
}

TEST_CASE("eigenscore matrix matches a dense full-pipeline oracle") {
  std::vector<Embedding> pool;
  for (int k = 0; k < 4; ++k) {
    pool.emplace_back("c" + std::to_string(k),
                      random_points(30, 2, 24 + static_cast<std::uint64_t>(k)));
  }
  const CandidateSet set(std::move(pool));
  const EigenscoreMatrix scores = eigenscore_matrix(set);

  // Oracle: materialize all normalized matrices, then dense-eigensolve each
  // per-sample Gram with Eigen.
  std::vector<Matrix> mats;
  for (Index k = 0; k < set.size(); ++k) {
    mats.push_back(full_normalized_matrix(set.candidate(k)));
  }
  for (Index i = 0; i < set.n(); ++i) {
    Matrix g(set.size(), set.size());
    for (Index a = 0; a < set.size(); ++a) {
      for (Index b = 0; b < set.size(); ++b) {
        g(a, b) = mats[static_cast<size_t>(a)].row(i).dot(
            mats[static_cast<size_t>(b)].row(i));
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    Vector u = es.eigenvectors().col(set.size() - 1).cwiseAbs();
    u /= u.norm();
    CHECK((scores.scores().row(i).transpose() - u).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("eigenscores invariant under similarity transform of one candidate") {
  std::vector<Embedding> pool;
  for (int k = 0; k < 3; ++k) {
    pool.emplace_back("c" + std::to_string(k),
                      random_points(25, 2, 30 + static_cast<std::uint64_t>(k)));
  }
  const CandidateSet base(pool);

  Matrix moved = pool[1].coords() * rotation2d(-0.9).transpose();
  moved *= 0.02;
  moved.rowwise() += Eigen::RowVector2d(100.0, -40.0);
  std::vector<Embedding> pool2;
  pool2.emplace_back("c0", pool[0].coords());
  pool2.emplace_back("c1", moved);
  pool2.emplace_back("c2", pool[2].coords());
  const CandidateSet transformed(std::move(pool2));

  const Matrix a = eigenscore_matrix(base).scores();
  const Matrix b = eigenscore_matrix(transformed).scores();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("eigenscore matrix deterministic across thread counts") {
  std::vector<Embedding> pool;
  for (int k = 0; k < 3; ++k) {
    pool.emplace_back("c" + std::to_string(k),
                      random_points(40, 2, 40 + static_cast<std::uint64_t>(k)));
  }
  const CandidateSet set(std::move(pool));
  const Matrix one = eigenscore_matrix(set, 1).scores();
  const Matrix eight = eigenscore_matrix(set, 8).scores();
  CHECK((one - eight).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("PC identity: fused row equals first principal component") {
  // For each sample the meta row must match P_i * u_i from an independent
  // SVD of the n x K row stack, whenever the leading loadings are
  // nonnegative.
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 20 + static_cast<Index>(rng() % 31);
    const Index k = 2 + static_cast<Index>(rng() % 5);
    std::vector<Embedding> pool;
    for (Index c = 0; c < k; ++c) {
      pool.emplace_back("c" + std::to_string(c), random_points(n, 2, rng()));
    }
    const CandidateSet set(std::move(pool));
    const EigenscoreMatrix scores = eigenscore_matrix(set);
    const MetaDistance meta = spectral_meta_distance(set, scores);

    for (Index i = 0; i < n; ++i) {
      Matrix stack_t(n, k);  // n x K row stack
      for (Index c = 0; c < k; ++c) {
        stack_t.col(c) =
            normalized_distance_row(set.candidate(c), i).values();
      }
      Eigen::BDCSVD<Matrix> svd(stack_t,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
      Vector loadings = svd.matrixV().col(0);
      if (loadings.sum() < 0.0) loadings = -loadings;
      if (loadings.minCoeff() < 0.0) continue;  // identity holds for |u| = u
      const Vector first_pc = stack_t * loadings;
      CHECK((meta.rows().row(i).transpose() - first_pc).cwiseAbs().maxCoeff() <
            1e-9);
    }
  }
}

TEST_CASE("model-(5) scene: eigenscores align with true concordance") {
  // High-SNR generator, K = 10; cos(s_hat, s) should be near 1.
  SceneConfig cfg;
  cfg.structure = SceneStructure::GaussianMixture;
  cfg.n = 120;
  cfg.p = 10;
  cfg.r = 4;
  cfg.theta = 8.0;
  cfg.seed = 77;
  const SyntheticScene scene = gen_gaussian_mixture(cfg);
  const GroundTruthDistance truth = ground_truth(scene);

  const Index k = 10;
  const DistortionModel model(1.0, Matrix::Identity(k, k),
                              Matrix::Constant(cfg.n, k, 1.0), 0);
  const DistortedCandidates candidates =
      gen_distorted_candidates(truth, model, 123);

  double worst = 1.0;
  for (Index i = 0; i < cfg.n; ++i) {
    const Matrix rows = candidates.normalized_rows_for_sample(i);
    const Vector truth_row = truth.normalized().row(i).transpose();
    const Vector s = true_concordance(rows, truth_row);
    const Vector s_hat = eigenscores_from_gram(gram_from_rows(rows));
    const double cos_angle = s.dot(s_hat) / (s.norm() * s_hat.norm());
    worst = std::min(worst, cos_angle);
  }
  CHECK(worst >= 0.99);
}

TEST_CASE("monotone SNR: mean eigenscore cosine non-decreasing in theta") {
  const std::vector<double> grid{1.0, 2.0, 4.0, 6.0, 8.0};
  std::vector<double> means;
  const Index k = 8;
  for (double theta : grid) {
    double acc = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      SceneConfig cfg;
      cfg.structure = SceneStructure::GaussianMixture;
      cfg.n = 90;
      cfg.p = 10;
      cfg.r = 4;
      cfg.theta = theta;
      cfg.seed = 900 + seed;
      const GroundTruthDistance truth = ground_truth(gen_gaussian_mixture(cfg));
      const DistortionModel model(1.0, Matrix::Identity(k, k),
                                  Matrix::Constant(cfg.n, k, 1.0), 0);
      const DistortedCandidates candidates =
          gen_distorted_candidates(truth, model, seed);
      for (Index i = 0; i < cfg.n; ++i) {
        const Matrix rows = candidates.normalized_rows_for_sample(i);
        const Vector truth_row = truth.normalized().row(i).transpose();
        const Vector s = true_concordance(rows, truth_row);
        const Vector s_hat = eigenscores_from_gram(gram_from_rows(rows));
        acc += s.dot(s_hat) / (s.norm() * s_hat.norm());
        ++count;
      }
    }
    means.push_back(acc / count);
  }
  int inversions = 0;
  double worst_drop = 0.0;
  for (size_t g = 1; g < means.size(); ++g) {
    if (means[g] < means[g - 1]) {
      ++inversions;
      worst_drop = std::max(worst_drop, means[g - 1] - means[g]);
    }
  }
  CHECK(inversions <= 1);
  CHECK(worst_drop <= 0.002);
}
