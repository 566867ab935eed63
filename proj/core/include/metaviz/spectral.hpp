#pragma once

#include <vector>

#include "metaviz/types.hpp"

namespace metaviz {

/// Diagnostics from a leading-eigenpair solve.
struct EigenSolveReport {
  double eigenvalue = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool degenerate_gap = false;   // lambda1 - lambda2 below 1e-9 * lambda1
  bool used_fallback = false;    // power iteration stalled, Jacobi sweep used
  bool uniform_fallback = false; // all-degenerate Gram, scores forced uniform
};

struct LeadingEigenpair {
  double eigenvalue = 0.0;
  Vector vector;
  EigenSolveReport report;
};

/// Leading eigenpair of a symmetric matrix. Power iteration from the uniform
/// positive start (relative Rayleigh tolerance 1e-12, at most 10000 steps);
/// a full cyclic-Jacobi decomposition takes over if that stalls. For a
/// nonnegative matrix with a clean gap the result is the Perron vector, so it
/// is entrywise nonnegative.
LeadingEigenpair leading_eigenpair(const Matrix& g);

/// K x K inner-product matrix of the rows of a K x n row stack. No range
/// validation; this is the kernel shared by the pipeline and the
/// signal-plus-noise harness (whose rows may carry negative entries).
Matrix gram_from_rows(const Matrix& rows);

/// Eigenscores from a raw Gram matrix: the entrywise absolute value of the
/// leading eigenvector. An all-zero matrix falls back to uniform 1/sqrt(K)
/// scores with the report flagged.
Vector eigenscores_from_gram(const Matrix& g, EigenSolveReport* report = nullptr);

/// Validated per-sample similarity matrix from K normalized rows at one
/// sample. Degenerate rows yield zero Gram rows/columns.
GramMatrix gram_matrix(const std::vector<NormalizedDistanceRow>& rows);

/// Eigenscores for one sample.
Vector eigenscores_for_sample(const GramMatrix& g,
                              EigenSolveReport* report = nullptr);

/// Stacks the K normalized distance rows at sample i (row k = candidate k).
/// The per-sample unit of work for scoring and fusion.
Matrix sample_row_stack(const CandidateSet& set, Index i,
                        std::vector<bool>* degenerate = nullptr);

/// Full n x K eigenscore matrix, row-parallel over samples. Results are
/// identical for any thread count.
EigenscoreMatrix eigenscore_matrix(const CandidateSet& set, int threads = 0);

}  // namespace metaviz
