#pragma once

#include <vector>

#include "metaviz/types.hpp"

namespace metaviz {

/// Weighted fusion kernel: sum over k of scores[k] * rows.row(k), accumulated
/// in ascending k. Shared by the pipeline and the signal-plus-noise harness.
Vector fuse_rows(const Vector& scores, const Matrix& rows);

/// Score-weighted combination of the K normalized rows at one sample.
Vector meta_distance_row(const Vector& scores,
                         const std::vector<NormalizedDistanceRow>& rows);

/// Meta-distance matrix: row i is the eigenscore-weighted sum of the K
/// streamed normalized rows at sample i. Output is not symmetrized.
MetaDistance spectral_meta_distance(const CandidateSet& set,
                                    const EigenscoreMatrix& scores,
                                    int threads = 0);

/// Uniform-weight baseline: row i is the plain average of the K normalized
/// rows, degenerate rows included.
MetaDistance naive_meta_distance(const CandidateSet& set, int threads = 0);

/// m + m^T with the symmetrized flag set; rejects already-symmetrized input.
MetaDistance symmetrize(const MetaDistance& m);

}  // namespace metaviz
