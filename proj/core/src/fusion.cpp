#include "metaviz/fusion.hpp"

#include "metaviz/parallel.hpp"
#include "metaviz/spectral.hpp"

namespace metaviz {

Vector fuse_rows(const Vector& scores, const Matrix& rows) {
  if (scores.size() != rows.rows()) {
    fail(ErrorCode::LengthMismatch,
         "got " + std::to_string(scores.size()) + " scores for " +
             std::to_string(rows.rows()) + " rows");
  }
  Vector out = Vector::Zero(rows.cols());
  for (Index k = 0; k < rows.rows(); ++k) {
    out += scores(k) * rows.row(k).transpose();
  }
  return out;
}

Vector meta_distance_row(const Vector& scores,
                         const std::vector<NormalizedDistanceRow>& rows) {
  if (rows.empty()) {
    fail(ErrorCode::EmptySet, "need at least one normalized row");
  }
  const Index n = rows.front().n();
  const Index sample = rows.front().sample();
  Matrix stack(static_cast<Index>(rows.size()), n);
  for (Index k = 0; k < stack.rows(); ++k) {
    const auto& row = rows[static_cast<size_t>(k)];
    if (row.n() != n || row.sample() != sample) {
      fail(ErrorCode::LengthMismatch,
           "row " + std::to_string(k) + " is not aligned to sample " +
               std::to_string(sample));
    }
    stack.row(k) = row.values().transpose();
  }
  return fuse_rows(scores, stack);
}

namespace {

MetaDistance combine(const CandidateSet& set, int threads,
                     const std::function<Vector(Index, const Matrix&)>& weigh) {
  validate_candidate_set(set);
  const Index n = set.n();
  Matrix meta(n, n);
  parallel_for_rows(static_cast<int>(n), threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const Matrix stack = sample_row_stack(set, i);
      meta.row(i) = fuse_rows(weigh(i, stack), stack).transpose();
    }
  });
  return MetaDistance(std::move(meta), false);
}

}  // namespace

MetaDistance spectral_meta_distance(const CandidateSet& set,
                                    const EigenscoreMatrix& scores,
                                    int threads) {
  if (scores.n() != set.n() || scores.k() != set.size()) {
    fail(ErrorCode::ShapeMismatch,
         "eigenscore matrix is " + std::to_string(scores.n()) + "x" +
             std::to_string(scores.k()) + " but candidate set needs " +
             std::to_string(set.n()) + "x" + std::to_string(set.size()));
  }
  return combine(set, threads, [&](Index i, const Matrix&) {
    return Vector(scores.scores().row(i).transpose());
  });
}

MetaDistance naive_meta_distance(const CandidateSet& set, int threads) {
  const double weight = 1.0 / static_cast<double>(set.size());
  const Vector uniform = Vector::Constant(set.size(), weight);
  return combine(set, threads,
                 [&](Index, const Matrix&) { return uniform; });
}

MetaDistance symmetrize(const MetaDistance& m) {
  if (m.symmetrized()) {
    fail(ErrorCode::AlreadySymmetrized, "meta-distance is already symmetrized");
  }
  Matrix out = m.rows() + m.rows().transpose();
  return MetaDistance(std::move(out), true);
}

}  // namespace metaviz
