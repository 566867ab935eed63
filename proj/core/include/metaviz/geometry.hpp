#pragma once

#include <optional>

#include "metaviz/types.hpp"

namespace metaviz {

/// Euclidean distances from sample i to every sample of the embedding.
/// Entry i is exactly zero. Uses the two-pass sqrt(sum of squared diffs)
/// form; summation runs over ascending j so the result is independent of
/// thread count.
Vector distance_row(const Embedding& e, Index i);

/// Rescales a nonnegative finite row to unit Euclidean norm. An all-zero row
/// stays zero and is flagged degenerate rather than erroring.
NormalizedDistanceRow normalize_row(const Vector& row, Index sample);

/// distance_row followed by normalize_row; never materializes the full
/// matrix. This is the streaming kernel behind the per-sample pipeline.
NormalizedDistanceRow normalized_distance_row(const Embedding& e, Index i);

/// Materializes the full n x n row-normalized distance matrix. Row i is
/// computed by the exact same expression as the streaming op.
Matrix full_normalized_matrix(const Embedding& e);

/// Plain (un-normalized) Euclidean distance matrix of a point set.
Matrix raw_distance_matrix(const Matrix& points);

/// Emits the n normalized rows of an embedding in index order.
class DistanceRowStream {
 public:
  explicit DistanceRowStream(const Embedding& e) : source_(&e) {}

  std::optional<NormalizedDistanceRow> next() {
    if (cursor_ >= source_->n()) return std::nullopt;
    return normalized_distance_row(*source_, cursor_++);
  }
  Index cursor() const { return cursor_; }

 private:
  const Embedding* source_;
  Index cursor_ = 0;
};

}  // namespace metaviz
