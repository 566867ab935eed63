#pragma once

#include "metaviz/types.hpp"

namespace metaviz {

struct AssessCombineResult {
  EigenscoreMatrix scores;
  MetaDistance meta;
};

/// One-pass per-sample run of scoring and fusion: each sample's normalized
/// rows are streamed once and used for both the eigenscores and the meta
/// row. Bit-identical to running eigenscore_matrix followed by
/// spectral_meta_distance.
AssessCombineResult assess_and_combine(const CandidateSet& set,
                                       int threads = 0);

}  // namespace metaviz
