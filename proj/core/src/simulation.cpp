#include "metaviz/simulation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "metaviz/geometry.hpp"
#include "metaviz/rng.hpp"

namespace metaviz {

namespace {

// Salt values keep the per-purpose RNG streams disjoint.
enum : std::uint64_t {
  kSaltHaar = 0x48414152,
  kSaltLabels = 0x4c41424c,
  kSaltNoise = 0x4e4f4953,
  kSaltPoints = 0x504f494e,
  kSaltSubsample = 0x53554253,
  kSaltDistort = 0x44495354,
};

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

double realized_diameter(const Matrix& points) {
  double best = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = i + 1; j < points.rows(); ++j) {
      best = std::max(best, (points.row(i) - points.row(j)).norm());
    }
  }
  return best;
}

// Centers a low-dimensional structure, rescales its realized diameter to
// theta exactly, rotates its plane into R^p, and adds unit Gaussian noise.
SyntheticScene embed_structure(Matrix low, const SceneConfig& cfg,
                               std::vector<int> labels) {
  const Index n = low.rows();
  const Index d = low.cols();
  low.rowwise() -= low.colwise().mean();
  const double diameter = realized_diameter(low);
  if (diameter > 0.0) {
    low *= cfg.theta / diameter;
  } else {
    low.setZero();
  }

  Matrix q = haar_rotation(cfg.p, mix64(cfg.seed ^ kSaltHaar));

  SyntheticScene scene;
  scene.signals = low * q.leftCols(d).transpose();
  auto noise_rng = make_rng(cfg.seed, kSaltNoise);
  scene.data = scene.signals + gaussian_matrix(n, cfg.p, noise_rng);
  if (!labels.empty()) scene.labels = std::move(labels);
  scene.theta = cfg.theta;
  scene.r = static_cast<int>(d);
  scene.seed = cfg.seed;
  scene.validate();
  return scene;
}

}  // namespace

Matrix haar_rotation(Index p, std::uint64_t seed) {
  if (p < 1) {
    fail(ErrorCode::InvalidConfig, "rotation dimension must be >= 1");
  }
  if (p == 1) return Matrix::Constant(1, 1, 1.0);
  auto rng = make_rng(seed, kSaltHaar);
  Matrix a = gaussian_matrix(p, p, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  if (q.determinant() < 0.0) q.col(p - 1) = -q.col(p - 1);
  return q;
}

SyntheticScene gen_gaussian_mixture(const SceneConfig& cfg) {
  if (cfg.structure != SceneStructure::GaussianMixture) {
    fail(ErrorCode::InvalidConfig, "config is not a gaussian-mixture scene");
  }
  const int clusters = cfg.r + 1;
  if (cfg.r < 1 || cfg.p < clusters || cfg.n < 2 * clusters) {
    fail(ErrorCode::InvalidConfig,
         "need r >= 1, p >= r+1 and n >= 2(r+1) for the point mixture");
  }
  if (!(cfg.theta >= 0.0)) {
    fail(ErrorCode::InvalidConfig, "theta must be nonnegative");
  }

  const Matrix q = haar_rotation(cfg.p, mix64(cfg.seed ^ kSaltHaar));
  // Orthogonal centers of equal norm theta: rotated scaled basis vectors.
  Matrix centers = cfg.theta * q.leftCols(clusters).transpose();

  auto label_rng = make_rng(cfg.seed, kSaltLabels);
  std::uniform_int_distribution<int> pick(0, clusters - 1);
  std::vector<int> labels(static_cast<size_t>(cfg.n));
  while (true) {
    std::vector<int> counts(static_cast<size_t>(clusters), 0);
    for (auto& label : labels) {
      label = pick(label_rng);
      ++counts[static_cast<size_t>(label)];
    }
    if (*std::min_element(counts.begin(), counts.end()) >= 2) break;
  }

  SyntheticScene scene;
  scene.signals.resize(cfg.n, cfg.p);
  for (Index i = 0; i < cfg.n; ++i) {
    scene.signals.row(i) = centers.row(labels[static_cast<size_t>(i)]);
  }
  auto noise_rng = make_rng(cfg.seed, kSaltNoise);
  scene.data = scene.signals + gaussian_matrix(cfg.n, cfg.p, noise_rng);
  scene.labels = std::move(labels);
  scene.theta = cfg.theta;
  scene.r = cfg.r;
  scene.seed = cfg.seed;
  scene.validate();
  return scene;
}

SyntheticScene gen_smiley(const SceneConfig& cfg) {
  if (cfg.structure != SceneStructure::Smiley) {
    fail(ErrorCode::InvalidConfig, "config is not a smiley scene");
  }
  if (cfg.n < 2 || cfg.p < 2 || !(cfg.theta >= 0.0)) {
    fail(ErrorCode::InvalidConfig, "smiley needs n >= 2, p >= 2, theta >= 0");
  }
  double total = 0.0;
  for (double w : cfg.smiley_mix) {
    if (w < 0.0) fail(ErrorCode::InvalidConfig, "negative smiley proportion");
    total += w;
  }
  if (total <= 0.0) {
    fail(ErrorCode::InvalidConfig, "smiley proportions sum to zero");
  }

  if (cfg.n < 8) {
    fail(ErrorCode::InvalidConfig,
         "smiley needs n >= 8 so every part gets at least 2 points");
  }

  constexpr double kPi = 3.14159265358979323846;
  auto rng = make_rng(cfg.seed, kSaltPoints);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix low(cfg.n, 2);
  std::vector<int> labels(static_cast<size_t>(cfg.n));
  for (int attempt = 0;; ++attempt) {
    std::array<int, 4> counts{};
    for (Index i = 0; i < cfg.n; ++i) {
      double pick = unit(rng) * total;
      int part = 0;
      for (; part < 3; ++part) {
        if (pick < cfg.smiley_mix[static_cast<size_t>(part)]) break;
        pick -= cfg.smiley_mix[static_cast<size_t>(part)];
      }
      double x = 0.0;
      double y = 0.0;
      switch (part) {
        case 0: {  // face outline, radius 0.5
          const double angle = 2.0 * kPi * unit(rng);
          x = 0.5 * std::cos(angle);
          y = 0.5 * std::sin(angle);
          break;
        }
        case 1:
        case 2: {  // eye discs, radius 0.06 at (+-0.18, 0.15)
          const double radius = 0.06 * std::sqrt(unit(rng));
          const double angle = 2.0 * kPi * unit(rng);
          x = (part == 1 ? -0.18 : 0.18) + radius * std::cos(angle);
          y = 0.15 + radius * std::sin(angle);
          break;
        }
        default: {  // mouth arc, radius 0.3, lower sector
          const double angle = (200.0 + 140.0 * unit(rng)) * kPi / 180.0;
          x = 0.3 * std::cos(angle);
          y = 0.3 * std::sin(angle);
          break;
        }
      }
      low(i, 0) = x;
      low(i, 1) = y;
      labels[static_cast<size_t>(i)] = part;
      ++counts[static_cast<size_t>(part)];
    }
    if (*std::min_element(counts.begin(), counts.end()) >= 2) break;
    if (attempt > 10000) {
      fail(ErrorCode::InvalidConfig,
           "could not fill every smiley part with 2+ points; raise n");
    }
  }
  return embed_structure(std::move(low), cfg, std::move(labels));
}

SyntheticScene gen_from_pointcloud(const SceneConfig& cfg) {
  if (cfg.structure != SceneStructure::PointCloud) {
    fail(ErrorCode::InvalidConfig, "config is not a point-cloud scene");
  }
  if (cfg.n < 2 || cfg.p < 3 || !(cfg.theta >= 0.0)) {
    fail(ErrorCode::InvalidConfig,
         "point-cloud scene needs n >= 2, p >= 3, theta >= 0");
  }
  std::ifstream in(cfg.pointcloud_path);
  if (!in) {
    fail(ErrorCode::FileNotFound,
         "cannot open point cloud '" + cfg.pointcloud_path + "'");
  }
  std::vector<std::array<double, 3>> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::array<double, 3> point{};
    if (!(fields >> point[0] >> point[1] >> point[2])) {
      fail(ErrorCode::MalformedCloud,
           cfg.pointcloud_path + ":" + std::to_string(line_no) +
               ": expected 3 reals");
    }
    double extra;
    if (fields >> extra) {
      fail(ErrorCode::MalformedCloud,
           cfg.pointcloud_path + ":" + std::to_string(line_no) +
               ": more than 3 columns");
    }
    points.push_back(point);
  }
  if (static_cast<Index>(points.size()) < cfg.n) {
    fail(ErrorCode::MalformedCloud,
         "cloud has " + std::to_string(points.size()) +
             " points, need at least " + std::to_string(cfg.n));
  }

  std::vector<Index> indices(points.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<Index>(i);
  auto rng = make_rng(cfg.seed, kSaltSubsample);
  std::shuffle(indices.begin(), indices.end(), rng);
  indices.resize(static_cast<size_t>(cfg.n));
  std::sort(indices.begin(), indices.end());

  Matrix low(cfg.n, 3);
  for (Index i = 0; i < cfg.n; ++i) {
    const auto& point = points[static_cast<size_t>(indices[static_cast<size_t>(i)])];
    low(i, 0) = point[0];
    low(i, 1) = point[1];
    low(i, 2) = point[2];
  }
  return embed_structure(std::move(low), cfg, {});
}

SyntheticScene generate_scene(const SceneConfig& cfg) {
  switch (cfg.structure) {
    case SceneStructure::GaussianMixture: return gen_gaussian_mixture(cfg);
    case SceneStructure::Smiley: return gen_smiley(cfg);
    case SceneStructure::PointCloud: return gen_from_pointcloud(cfg);
  }
  fail(ErrorCode::InvalidConfig, "unknown scene structure");
}

GroundTruthDistance ground_truth(const SyntheticScene& scene) {
  scene.validate();
  const Embedding signals("signals", scene.signals);
  const Index n = scene.n();
  Matrix raw(n, n);
  for (Index i = 0; i < n; ++i) {
    raw.row(i) = distance_row(signals, i).transpose();
  }
  Matrix normalized(n, n);
  for (Index i = 0; i < n; ++i) {
    normalized.row(i) =
        normalize_row(raw.row(i).transpose(), i).values().transpose();
  }
  return GroundTruthDistance(std::move(raw), std::move(normalized));
}

DistortedCandidates::DistortedCandidates(GroundTruthDistance truth,
                                         DistortionModel model,
                                         std::uint64_t seed, bool clamp)
    : truth_(std::move(truth)),
      model_(std::move(model)),
      seed_(seed),
      clamp_(clamp) {
  if (model_.scales().rows() != truth_.n()) {
    fail(ErrorCode::InvalidModel,
         "scales must have one row per sample");
  }
  // Symmetric square root of the good-block correlation; robust to PSD
  // boundary cases where Cholesky would fail.
  const Index good = model_.good_count();
  const Matrix block = model_.correlation().topLeftCorner(good, good);
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  mixing_ = es.eigenvectors() * clipped.cwiseSqrt().asDiagonal() *
            es.eigenvectors().transpose();
}

Matrix DistortedCandidates::rows_for_sample(Index i) const {
  const Index n = truth_.n();
  if (i < 0 || i >= n) {
    fail(ErrorCode::IndexOutOfRange, "sample " + std::to_string(i));
  }
  const Index k = model_.k();
  const Index good = model_.good_count();
  const Vector truth_row = truth_.raw().row(i).transpose();
  const double truth_norm = truth_row.norm();

  Matrix rows(k, n);

  // Base draws are seeded per (seed, i, k), then mixed across candidates so
  // coordinate-wise correlation matches R without breaking counter seeding.
  Matrix distortion = Matrix::Zero(good, n);
  for (Index l = 0; l < good; ++l) {
    auto rng = make_rng(seed_, kSaltDistort, static_cast<std::uint64_t>(i),
                        static_cast<std::uint64_t>(l));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector base(n);
    for (Index j = 0; j < n; ++j) base(j) = normal(rng);
    for (Index kk = 0; kk < good; ++kk) {
      if (mixing_(kk, l) != 0.0) distortion.row(kk) += mixing_(kk, l) * base.transpose();
    }
  }
  for (Index kk = 0; kk < good; ++kk) {
    const double scale = model_.scales()(i, kk);
    rows.row(kk) =
        scale * (truth_row.transpose() + model_.sigma() * distortion.row(kk));
  }

  for (Index kk = good; kk < k; ++kk) {
    auto rng = make_rng(seed_, kSaltDistort, static_cast<std::uint64_t>(i),
                        static_cast<std::uint64_t>(kk));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector draw(n);
    for (Index j = 0; j < n; ++j) draw(j) = normal(rng);
    if (truth_norm > 0.0) {
      const Vector unit_truth = truth_row / truth_norm;
      draw -= unit_truth * unit_truth.dot(draw);
      const double draw_norm = draw.norm();
      if (draw_norm > 0.0) {
        draw *= truth_norm / draw_norm;
      }
    } else {
      draw.setZero();
    }
    rows.row(kk) = draw.transpose();
  }

  if (clamp_) rows = rows.cwiseMax(0.0);
  return rows;
}

Matrix DistortedCandidates::normalized_rows_for_sample(Index i) const {
  Matrix rows = rows_for_sample(i);
  for (Index k = 0; k < rows.rows(); ++k) {
    const double norm = rows.row(k).norm();
    if (norm > 0.0) rows.row(k) /= norm;
  }
  return rows;
}

DistortedCandidates gen_distorted_candidates(GroundTruthDistance truth,
                                             DistortionModel model,
                                             std::uint64_t seed, bool clamp) {
  return DistortedCandidates(std::move(truth), std::move(model), seed, clamp);
}

Vector true_concordance(const Matrix& normalized_rows,
                        const Vector& normalized_truth_row) {
  if (normalized_rows.cols() != normalized_truth_row.size()) {
    fail(ErrorCode::LengthMismatch, "row length differs from truth row");
  }
  if (normalized_truth_row.norm() == 0.0) {
    fail(ErrorCode::DegenerateTruth, "truth row is all zero");
  }
  return normalized_rows * normalized_truth_row;
}

}  // namespace metaviz
