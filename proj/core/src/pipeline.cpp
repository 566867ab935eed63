#include "metaviz/pipeline.hpp"

#include "metaviz/fusion.hpp"
#include "metaviz/parallel.hpp"
#include "metaviz/spectral.hpp"

namespace metaviz {

AssessCombineResult assess_and_combine(const CandidateSet& set, int threads) {
  validate_candidate_set(set);
  const Index n = set.n();
  const Index k = set.size();
  Matrix scores(n, k);
  Matrix meta(n, n);
  parallel_for_rows(static_cast<int>(n), threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const Matrix stack = sample_row_stack(set, i);
      const Vector row_scores = eigenscores_from_gram(gram_from_rows(stack));
      scores.row(i) = row_scores.transpose();
      meta.row(i) = fuse_rows(row_scores, stack).transpose();
    }
  });
  return AssessCombineResult{EigenscoreMatrix(std::move(scores)),
                             MetaDistance(std::move(meta), false)};
}

}  // namespace metaviz
