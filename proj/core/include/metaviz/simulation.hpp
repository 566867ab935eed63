#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "metaviz/types.hpp"

namespace metaviz {

enum class SceneStructure { GaussianMixture, Smiley, PointCloud };

/// Configuration for the synthetic scene generators. `theta` is the diameter
/// / signal-strength knob; zero is allowed and produces the fully degenerate
/// scene (all signals at the origin).
struct SceneConfig {
  SceneStructure structure = SceneStructure::GaussianMixture;
  Index n = 0;
  Index p = 0;
  int r = 5;          // intrinsic dimension; mixture uses r + 1 clusters
  double theta = 1.0;
  std::uint64_t seed = 0;
  std::string pointcloud_path;
  // mass split for the smiley parts: outline, left eye, right eye, mouth
  std::array<double, 4> smiley_mix = {0.6, 0.1, 0.1, 0.2};
};

/// Haar-distributed rotation (det +1) via QR of a Gaussian matrix with the
/// R-diagonal sign fix.
Matrix haar_rotation(Index p, std::uint64_t seed);

/// Setting (i): r + 1 orthogonal cluster centers of norm theta, uniform
/// labels (re-drawn until every cluster has at least two members), unit
/// Gaussian noise.
SyntheticScene gen_gaussian_mixture(const SceneConfig& cfg);

/// Setting (ii): points sampled from a parametric 2-D smiley (outline, two
/// eye discs, mouth arc), rescaled so the realized diameter is exactly theta,
/// isometrically rotated into R^p, plus unit Gaussian noise. Labels mark the
/// smiley part each point came from.
SyntheticScene gen_smiley(const SceneConfig& cfg);

/// Setting (iii): subsamples n points from a 3-column text point cloud,
/// centers and rescales to diameter theta, rotates the 3-plane into R^p,
/// adds unit Gaussian noise. Lines starting with '#' are ignored.
SyntheticScene gen_from_pointcloud(const SceneConfig& cfg);

SyntheticScene generate_scene(const SceneConfig& cfg);

/// Raw and row-normalized pairwise distances among the noiseless signals.
GroundTruthDistance ground_truth(const SyntheticScene& scene);

/// Candidate distance rows drawn from the scaled signal-plus-noise model
/// around a ground truth. Rows are produced per sample on demand with
/// counter-based seeding, so any subset can be generated in any order with
/// identical results. Good candidates share coordinate-wise Gaussian
/// distortions correlated across candidates by R; the trailing
/// `adversarial_count` candidates instead get rows orthogonal to the truth
/// row (a Gram-Schmidt-orthogonalized Gaussian rescaled to the truth row's
/// norm). Good rows may contain negative entries unless `clamp` is set.
class DistortedCandidates {
 public:
  DistortedCandidates(GroundTruthDistance truth, DistortionModel model,
                      std::uint64_t seed, bool clamp = false);

  /// K x n matrix of candidate rows for sample i.
  Matrix rows_for_sample(Index i) const;

  /// rows_for_sample with each row rescaled to unit norm (zero rows kept).
  Matrix normalized_rows_for_sample(Index i) const;

  const GroundTruthDistance& truth() const { return truth_; }
  const DistortionModel& model() const { return model_; }
  Index n() const { return truth_.n(); }
  Index k() const { return model_.k(); }

 private:
  GroundTruthDistance truth_;
  DistortionModel model_;
  std::uint64_t seed_;
  bool clamp_;
  Matrix mixing_;  // symmetric square root of the good-block correlation
};

DistortedCandidates gen_distorted_candidates(GroundTruthDistance truth,
                                             DistortionModel model,
                                             std::uint64_t seed,
                                             bool clamp = false);

/// True per-sample concordance: inner products of K unit-normalized candidate
/// rows with the unit-normalized truth row.
Vector true_concordance(const Matrix& normalized_rows,
                        const Vector& normalized_truth_row);

}  // namespace metaviz
