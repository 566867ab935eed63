#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metaviz/errors.hpp"

namespace metaviz {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// One candidate visualization: n sample coordinates in d dimensions.
/// Coordinates must be finite and n >= 2; any d >= 1 is accepted since the
/// method only ever consumes pairwise distances.
class Embedding {
 public:
  Embedding(std::string name, Matrix coords);

  const std::string& name() const { return name_; }
  const Matrix& coords() const { return coords_; }
  Index n() const { return coords_.rows(); }
  Index dim() const { return coords_.cols(); }

 private:
  std::string name_;
  Matrix coords_;
};

/// An ordered collection of K candidate embeddings over the same n samples,
/// with unique names. This is the input unit of the whole pipeline.
class CandidateSet {
 public:
  explicit CandidateSet(std::vector<Embedding> candidates);

  const std::vector<Embedding>& candidates() const { return candidates_; }
  const Embedding& candidate(Index k) const {
    return candidates_[static_cast<size_t>(k)];
  }
  Index size() const { return static_cast<Index>(candidates_.size()); }
  Index n() const { return candidates_.front().n(); }
  std::vector<std::string> names() const;

 private:
  std::vector<Embedding> candidates_;
};

/// Re-checks every CandidateSet invariant and returns the set unchanged.
/// All violations are reported together in the thrown message.
const CandidateSet& validate_candidate_set(const CandidateSet& set);

/// One row of a row-normalized pairwise-distance matrix. `degenerate` marks
/// rows whose source was all zero (every point coincident with the sample);
/// such rows stay zero instead of turning into NaN.
class NormalizedDistanceRow {
 public:
  NormalizedDistanceRow(Index sample, Vector values, bool degenerate);

  Index sample() const { return sample_; }
  const Vector& values() const { return values_; }
  bool degenerate() const { return degenerate_; }
  Index n() const { return values_.size(); }

 private:
  Index sample_;
  Vector values_;
  bool degenerate_;
};

/// Per-sample K x K similarity matrix between candidates: inner products of
/// their normalized distance rows at one sample. Valid only for genuine
/// distance rows (entries in [0,1], PSD, unit diagonal except degenerates).
class GramMatrix {
 public:
  GramMatrix(Index sample, Matrix entries, std::vector<bool> degenerate);

  Index sample() const { return sample_; }
  const Matrix& entries() const { return entries_; }
  const std::vector<bool>& degenerate() const { return degenerate_; }
  Index k() const { return entries_.rows(); }

 private:
  Index sample_;
  Matrix entries_;
  std::vector<bool> degenerate_;
};

/// n x K matrix of per-sample candidate scores; each row is nonnegative with
/// unit Euclidean norm (the all-degenerate fallback row 1/sqrt(K) included).
class EigenscoreMatrix {
 public:
  explicit EigenscoreMatrix(Matrix scores);

  const Matrix& scores() const { return scores_; }
  Index n() const { return scores_.rows(); }
  Index k() const { return scores_.cols(); }

 private:
  Matrix scores_;
};

/// Fused n x n distance profile matrix. Rows are weighted sums of normalized
/// candidate rows; not symmetric until `symmetrize` has been applied.
class MetaDistance {
 public:
  MetaDistance(Matrix rows, bool symmetrized);

  const Matrix& rows() const { return rows_; }
  bool symmetrized() const { return symmetrized_; }
  Index n() const { return rows_.rows(); }

 private:
  Matrix rows_;
  bool symmetrized_;
};

/// A generated dataset: noiseless signals, their noisy observation, and any
/// side information (cluster labels, a ground-truth ordering) the structure
/// defines.
struct SyntheticScene {
  Matrix signals;                                 // n x p noiseless
  Matrix data;                                    // n x p observed
  std::optional<std::vector<int>> labels;         // cluster ids
  std::optional<std::vector<int>> true_order;     // rank per sample
  double theta = 0.0;                             // structure diameter
  int r = 0;                                      // intrinsic dimension
  std::uint64_t seed = 0;

  Index n() const { return data.rows(); }
  Index p() const { return data.cols(); }
  void validate() const;
};

/// Pairwise distances among the noiseless signals, raw and row-normalized.
/// The reference object every concordance metric is computed against.
class GroundTruthDistance {
 public:
  GroundTruthDistance(Matrix raw, Matrix normalized);

  const Matrix& raw() const { return raw_; }
  const Matrix& normalized() const { return normalized_; }
  Index n() const { return raw_.rows(); }
  bool row_degenerate(Index i) const { return raw_.row(i).norm() == 0.0; }

 private:
  Matrix raw_;
  Matrix normalized_;
};

/// Parameters of the scaled signal-plus-noise generator for candidate
/// distance rows: noise scale sigma, cross-candidate correlation R, positive
/// per-sample/per-candidate scale factors, and how many of the trailing
/// candidates are adversarial (rows orthogonal to the truth).
class DistortionModel {
 public:
  DistortionModel(double sigma, Matrix correlation, Matrix scales,
                  int adversarial_count);

  double sigma() const { return sigma_; }
  const Matrix& correlation() const { return correlation_; }
  const Matrix& scales() const { return scales_; }
  int adversarial_count() const { return adversarial_count_; }
  double correlation_norm() const { return rho_; }  // spectral norm of R
  Index k() const { return correlation_.rows(); }
  Index good_count() const { return k() - adversarial_count_; }

 private:
  double sigma_;
  Matrix correlation_;
  Matrix scales_;
  int adversarial_count_;
  double rho_;
};

}  // namespace metaviz
