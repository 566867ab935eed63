#include "metaviz/embedders.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "metaviz/fusion.hpp"
#include "metaviz/geometry.hpp"
#include "metaviz/rng.hpp"

namespace metaviz {

EmbedMethod parse_embed_method(const std::string& name) {
  if (name == "pca") return EmbedMethod::Pca;
  if (name == "mds" || name == "classical-mds") return EmbedMethod::ClassicalMds;
  if (name == "kpca" || name == "gaussian-kpca") return EmbedMethod::GaussianKpca;
  if (name == "leim" || name == "laplacian-eigenmap") {
    return EmbedMethod::LaplacianEigenmap;
  }
  if (name == "random-projection" || name == "rp") {
    return EmbedMethod::RandomProjection;
  }
  fail(ErrorCode::UnsupportedMethod, "unknown embedding method '" + name + "'");
}

const char* embed_method_name(EmbedMethod method) {
  switch (method) {
    case EmbedMethod::Pca: return "pca";
    case EmbedMethod::ClassicalMds: return "classical-mds";
    case EmbedMethod::GaussianKpca: return "gaussian-kpca";
    case EmbedMethod::LaplacianEigenmap: return "laplacian-eigenmap";
    case EmbedMethod::RandomProjection: return "random-projection";
  }
  return "unknown";
}

namespace {

void require_distance_input(const Matrix& d) {
  const Index n = d.rows();
  if (d.cols() != n || n < 2) {
    fail(ErrorCode::ShapeMismatch, "distance matrix must be square, n >= 2");
  }
  if (!d.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "distance matrix has non-finite entries");
  }
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    fail(ErrorCode::NotSymmetric, "distance matrix is not symmetric");
  }
  if (d.minCoeff() < 0.0) {
    fail(ErrorCode::NegativeEntry, "distance matrix has negative entries");
  }
}

// Flips each column so its largest-magnitude entry is positive; first
// occurrence wins ties, keeping eigen-based embedders bit-stable.
void fix_signs(Matrix& coords) {
  for (Index j = 0; j < coords.cols(); ++j) {
    Index amax = 0;
    coords.col(j).cwiseAbs().maxCoeff(&amax);
    if (coords(amax, j) < 0.0) coords.col(j) = -coords.col(j);
  }
}

// Top-dim eigenpairs of a symmetric matrix, coordinates scaled by
// sqrt(max(eigenvalue, 0)).
Matrix spectral_coords(const Matrix& sym, Index dim, EmbedInfo* info) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Index n = sym.rows();
  Matrix coords = Matrix::Zero(n, dim);
  const Index take = std::min(dim, n);
  for (Index j = 0; j < take; ++j) {
    const Index src = n - 1 - j;  // eigenvalues come back ascending
    const double value = es.eigenvalues()(src);
    if (info != nullptr) info->eigenvalues.push_back(value);
    if (value > 0.0) {
      coords.col(j) = es.eigenvectors().col(src) * std::sqrt(value);
    } else if (info != nullptr) {
      info->rank_deficient = true;
    }
  }
  fix_signs(coords);
  return coords;
}

}  // namespace

Embedding pca_embed(const Matrix& data, Index dim, EmbedInfo* info,
                    const std::string& name) {
  if (dim < 1) fail(ErrorCode::InvalidConfig, "dim must be >= 1");
  if (data.rows() < dim) {
    fail(ErrorCode::ShapeMismatch, "need n >= dim samples");
  }
  if (!data.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "data has non-finite entries");
  }
  Matrix centered = data.rowwise() - data.colwise().mean();
  Eigen::BDCSVD<Matrix> svd(centered,
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double tol = std::max(data.rows(), data.cols()) *
                     std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  for (Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > tol) ++rank;
  }
  const Index take = std::min(dim, rank);
  Matrix coords = Matrix::Zero(data.rows(), dim);
  for (Index j = 0; j < take; ++j) {
    coords.col(j) = centered * svd.matrixV().col(j);
    if (info != nullptr) info->eigenvalues.push_back(sv(j) * sv(j));
  }
  if (take < dim && info != nullptr) info->rank_deficient = true;
  // Sign convention follows the loadings, applied to the coordinates.
  for (Index j = 0; j < take; ++j) {
    Index amax = 0;
    svd.matrixV().col(j).cwiseAbs().maxCoeff(&amax);
    if (svd.matrixV()(amax, j) < 0.0) coords.col(j) = -coords.col(j);
  }
  return Embedding(name, std::move(coords));
}

Embedding classical_mds_from_distance(const Matrix& d, Index dim,
                                      EmbedInfo* info,
                                      const std::string& name) {
  if (dim < 1) fail(ErrorCode::InvalidConfig, "dim must be >= 1");
  require_distance_input(d);
  const Index n = d.rows();
  Matrix squared = d.cwiseProduct(d);
  // B = -1/2 J D2 J, with J the centering projector.
  Vector row_means = squared.rowwise().mean();
  const double grand = squared.mean();
  Matrix b(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      b(i, j) = -0.5 * (squared(i, j) - row_means(i) - row_means(j) + grand);
    }
  }
  return Embedding(name, spectral_coords(b, dim, info));
}

Embedding gaussian_kpca_from_distance(const Matrix& d, double sigma, Index dim,
                                      EmbedInfo* info,
                                      const std::string& name) {
  if (dim < 1) fail(ErrorCode::InvalidConfig, "dim must be >= 1");
  if (!(sigma > 0.0)) {
    fail(ErrorCode::NonPositiveSigma, "kernel width must be positive");
  }
  require_distance_input(d);
  const Index n = d.rows();
  Matrix kernel =
      (-d.cwiseProduct(d) / (2.0 * sigma * sigma)).array().exp().matrix();
  Vector row_means = kernel.rowwise().mean();
  const double grand = kernel.mean();
  Matrix centered(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      centered(i, j) = kernel(i, j) - row_means(i) - row_means(j) + grand;
    }
  }
  return Embedding(name, spectral_coords(centered, dim, info));
}

double median_heuristic_sigma(const Matrix& d) {
  require_distance_input(d);
  std::vector<double> off;
  off.reserve(static_cast<size_t>(d.rows()) * (d.rows() - 1) / 2);
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = i + 1; j < d.cols(); ++j) off.push_back(d(i, j));
  }
  std::sort(off.begin(), off.end());
  const size_t m = off.size();
  const double median =
      m % 2 == 1 ? off[m / 2] : 0.5 * (off[m / 2 - 1] + off[m / 2]);
  const double sigma = median / std::sqrt(2.0);
  if (!(sigma > 0.0)) {
    fail(ErrorCode::NonPositiveSigma,
         "median off-diagonal distance is zero; pass sigma explicitly");
  }
  return sigma;
}

Embedding laplacian_eigenmap_from_distance(const Matrix& d, Index knn,
                                           Index dim, EmbedInfo* info,
                                           const std::string& name) {
  if (dim < 1) fail(ErrorCode::InvalidConfig, "dim must be >= 1");
  require_distance_input(d);
  const Index n = d.rows();
  if (knn < 1 || knn >= n) {
    fail(ErrorCode::InvalidConfig, "need 1 <= knn < n");
  }

  // Union-symmetrized binary kNN graph; ties resolved by lower index.
  std::vector<std::vector<char>> adjacency(
      static_cast<size_t>(n), std::vector<char>(static_cast<size_t>(n), 0));
  std::vector<Index> neighbors(static_cast<size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    Index m = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) neighbors[static_cast<size_t>(m++)] = j;
    }
    std::partial_sort(
        neighbors.begin(), neighbors.begin() + knn, neighbors.end(),
        [&](Index a, Index b) {
          if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
          return a < b;
        });
    for (Index t = 0; t < knn; ++t) {
      const Index j = neighbors[static_cast<size_t>(t)];
      adjacency[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
      adjacency[static_cast<size_t>(j)][static_cast<size_t>(i)] = 1;
    }
  }

  // Connected components, then embed the largest.
  std::vector<int> component(static_cast<size_t>(n), -1);
  int count = 0;
  for (Index start = 0; start < n; ++start) {
    if (component[static_cast<size_t>(start)] >= 0) continue;
    std::vector<Index> stack{start};
    component[static_cast<size_t>(start)] = count;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index j = 0; j < n; ++j) {
        if (adjacency[static_cast<size_t>(v)][static_cast<size_t>(j)] &&
            component[static_cast<size_t>(j)] < 0) {
          component[static_cast<size_t>(j)] = count;
          stack.push_back(j);
        }
      }
    }
    ++count;
  }
  std::vector<Index> sizes(static_cast<size_t>(count), 0);
  for (Index i = 0; i < n; ++i) ++sizes[static_cast<size_t>(component[static_cast<size_t>(i)])];
  int largest = 0;
  for (int c = 1; c < count; ++c) {
    if (sizes[static_cast<size_t>(c)] > sizes[static_cast<size_t>(largest)]) largest = c;
  }
  if (info != nullptr) {
    info->components = count;
    info->disconnected = count > 1;
  }

  std::vector<Index> members;
  for (Index i = 0; i < n; ++i) {
    if (component[static_cast<size_t>(i)] == largest) members.push_back(i);
  }
  const Index m = static_cast<Index>(members.size());

  Matrix w = Matrix::Zero(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      w(a, b) = adjacency[static_cast<size_t>(members[static_cast<size_t>(a)])]
                         [static_cast<size_t>(members[static_cast<size_t>(b)])];
    }
  }
  Vector degrees = w.rowwise().sum();
  Vector inv_sqrt = degrees.cwiseSqrt().cwiseInverse();
  Matrix lap = Matrix::Identity(m, m) -
               inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal();
  lap = 0.5 * (lap + lap.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(lap);
  // Ascending eigenvalues; index 0 is the structural zero of the component.
  Matrix coords = Matrix::Zero(n, dim);
  const Index avail = std::min(dim, m - 1);
  if (avail < dim && info != nullptr) info->rank_deficient = true;
  if (info != nullptr) {
    info->eigenvalues.assign(es.eigenvalues().data(),
                             es.eigenvalues().data() + m);
  }
  Matrix local = Matrix::Zero(m, dim);
  for (Index j = 0; j < avail; ++j) local.col(j) = es.eigenvectors().col(j + 1);
  fix_signs(local);
  for (Index a = 0; a < m; ++a) {
    coords.row(members[static_cast<size_t>(a)]) = local.row(a);
  }
  return Embedding(name, std::move(coords));
}

Embedding random_projection_embed(const Matrix& data, Index dim,
                                  std::uint64_t seed,
                                  const std::string& name) {
  if (dim < 1) fail(ErrorCode::InvalidConfig, "dim must be >= 1");
  if (data.cols() < 1) {
    fail(ErrorCode::ShapeMismatch, "data needs at least one feature");
  }
  auto rng = make_rng(seed, 0x52504a4cULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix projection(data.cols(), dim);
  for (Index i = 0; i < projection.rows(); ++i) {
    for (Index j = 0; j < dim; ++j) projection(i, j) = normal(rng);
  }
  projection /= std::sqrt(static_cast<double>(dim));
  return Embedding(name, data * projection);
}

std::vector<Embedding> diverse_candidates(const Matrix& data, Index count,
                                          std::uint64_t seed) {
  if (count < 1) {
    fail(ErrorCode::InvalidConfig, "need at least one candidate");
  }
  const Matrix distances = raw_distance_matrix(data);
  const double sigma = median_heuristic_sigma(distances);
  const Index n = data.rows();
  const Index knn_small = std::min<Index>(10, n - 1);
  const Index knn_large = std::min<Index>(25, n - 1);

  std::vector<Embedding> out;
  out.reserve(static_cast<size_t>(count));
  const Index dim = 2;
  auto add = [&](Embedding e) {
    if (static_cast<Index>(out.size()) < count) out.push_back(std::move(e));
  };
  add(pca_embed(data, dim, nullptr, "pca"));
  add(classical_mds_from_distance(distances, dim, nullptr, "mds"));
  add(gaussian_kpca_from_distance(distances, 0.5 * sigma, dim, nullptr,
                                  "kpca-narrow"));
  add(gaussian_kpca_from_distance(distances, 2.0 * sigma, dim, nullptr,
                                  "kpca-wide"));
  add(laplacian_eigenmap_from_distance(distances, knn_small, dim, nullptr,
                                       "leim-" + std::to_string(knn_small)));
  add(laplacian_eigenmap_from_distance(distances, knn_large, dim, nullptr,
                                       "leim-" + std::to_string(knn_large)));
  for (Index extra = 0; static_cast<Index>(out.size()) < count; ++extra) {
    add(random_projection_embed(data, dim, mix64(seed) + static_cast<std::uint64_t>(extra),
                                "rp-" + std::to_string(extra)));
  }
  return out;
}

Embedding meta_embed(const MetaDistance& m, const EmbedderConfig& cfg,
                     EmbedInfo* info) {
  if (cfg.method == EmbedMethod::Pca ||
      cfg.method == EmbedMethod::RandomProjection) {
    fail(ErrorCode::UnsupportedMethod,
         std::string(embed_method_name(cfg.method)) +
             " needs raw data, not a distance matrix");
  }
  const MetaDistance* source = &m;
  MetaDistance symmetrized_storage(Matrix::Zero(1, 1), false);
  if (!m.symmetrized()) {
    symmetrized_storage = symmetrize(m);
    source = &symmetrized_storage;
    if (info != nullptr) info->auto_symmetrized = true;
  }
  const Matrix& d = source->rows();
  switch (cfg.method) {
    case EmbedMethod::ClassicalMds:
      return classical_mds_from_distance(d, cfg.dim, info, "meta-mds");
    case EmbedMethod::GaussianKpca: {
      const double sigma =
          cfg.sigma > 0.0 ? cfg.sigma : median_heuristic_sigma(d);
      return gaussian_kpca_from_distance(d, sigma, cfg.dim, info, "meta-kpca");
    }
    case EmbedMethod::LaplacianEigenmap:
      return laplacian_eigenmap_from_distance(d, cfg.knn, cfg.dim, info,
                                              "meta-leim");
    default:
      fail(ErrorCode::UnsupportedMethod, "unreachable");
  }
}

}  // namespace metaviz
