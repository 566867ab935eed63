#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metaviz/types.hpp"

namespace metaviz {

enum class EmbedMethod {
  Pca,
  ClassicalMds,
  GaussianKpca,
  LaplacianEigenmap,
  RandomProjection,
};

EmbedMethod parse_embed_method(const std::string& name);
const char* embed_method_name(EmbedMethod method);

struct EmbedderConfig {
  EmbedMethod method = EmbedMethod::GaussianKpca;
  Index dim = 2;
  double sigma = 0.0;    // kpca width; <= 0 means median heuristic
  Index knn = 15;        // laplacian-eigenmap neighbor count
  std::uint64_t seed = 0;  // random projection
};

/// Diagnostics the embedders surface instead of erroring: rank shortfalls,
/// disconnected neighborhood graphs, implicit symmetrization.
struct EmbedInfo {
  bool rank_deficient = false;
  bool disconnected = false;
  bool auto_symmetrized = false;
  int components = 1;
  std::vector<double> eigenvalues;  // spectrum backing the coordinates
};

/// Projection onto the top-dim right singular vectors of the column-centered
/// data. Missing rank is padded with zero columns and flagged. Sign fixed so
/// each component's largest-magnitude loading is positive.
Embedding pca_embed(const Matrix& data, Index dim, EmbedInfo* info = nullptr,
                    const std::string& name = "pca");

/// Classical (Torgerson) MDS from a symmetric nonnegative distance matrix:
/// double-centered squared distances, top-dim eigenpairs, coordinates scaled
/// by sqrt(eigenvalue); negative eigenvalues truncate to zero.
Embedding classical_mds_from_distance(const Matrix& d, Index dim,
                                      EmbedInfo* info = nullptr,
                                      const std::string& name = "mds");

/// Kernel PCA with the Gaussian kernel exp(-d^2 / (2 sigma^2)) built from a
/// distance matrix.
Embedding gaussian_kpca_from_distance(const Matrix& d, double sigma, Index dim,
                                      EmbedInfo* info = nullptr,
                                      const std::string& name = "kpca");

/// Median heuristic width: median off-diagonal distance divided by sqrt(2).
double median_heuristic_sigma(const Matrix& d);

/// Laplacian eigenmap over the union-symmetrized binary kNN graph of a
/// distance matrix, using the symmetric normalized Laplacian. A disconnected
/// graph embeds the largest component and parks the rest at the origin.
Embedding laplacian_eigenmap_from_distance(const Matrix& d, Index knn,
                                           Index dim,
                                           EmbedInfo* info = nullptr,
                                           const std::string& name = "leim");

/// data times a seeded p x dim Gaussian matrix scaled by 1/sqrt(dim).
Embedding random_projection_embed(const Matrix& data, Index dim,
                                  std::uint64_t seed,
                                  const std::string& name = "random-projection");

/// Final step of the pipeline: embeds a meta-distance matrix with one of the
/// distance-consuming methods. Un-symmetrized input is symmetrized first and
/// the info flag records it. Data-side methods (pca, random-projection) are
/// rejected.
Embedding meta_embed(const MetaDistance& m, const EmbedderConfig& cfg,
                     EmbedInfo* info = nullptr);

/// A fixed roster of 2-D candidate visualizations of a raw dataset: PCA,
/// classical MDS, two kPCA widths, two Laplacian-eigenmap neighborhoods,
/// then seeded random projections to fill up to `count`.
std::vector<Embedding> diverse_candidates(const Matrix& data, Index count,
                                          std::uint64_t seed);

}  // namespace metaviz
