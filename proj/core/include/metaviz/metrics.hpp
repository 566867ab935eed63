#pragma once

#include <vector>

#include "metaviz/types.hpp"

namespace metaviz {

/// Cosine of the angle between two nonzero vectors, clamped to [-1, 1].
double cosine(const Vector& u, const Vector& v);

struct ConcordanceResult {
  double mean = 0.0;   // average inner product of unit rows with truth rows
  int skipped = 0;     // samples whose truth row was degenerate
};

/// Mean concordance of a set of row profiles (one per sample) against the
/// normalized ground-truth rows. Each row is unit-normalized on the fly;
/// degenerate truth rows are skipped and counted.
ConcordanceResult mean_concordance(const Matrix& rows,
                                   const GroundTruthDistance& truth);

/// Per-sample Silhouette indices for a symmetric zero-diagonal distance
/// matrix and integer cluster labels. Needs >= 2 clusters, each of size >= 2.
Vector silhouette(const Matrix& distances, const std::vector<int>& labels);

/// Kendall's tau-b (tie-corrected) between two equal-length score vectors.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);
double kendall_tau(const Vector& a, const Vector& b);

enum class OrderMode { Circular, Principal };

/// An ordering of the samples extracted from a 2-D embedding, either by
/// angle around the centroid (cyclic structures) or by projection onto the
/// first principal axis (trajectories).
struct OrderExtraction {
  OrderMode mode = OrderMode::Circular;
  std::vector<int> order;       // rank of each sample, a permutation of 0..n-1
  std::vector<double> angles;   // radians, circular mode only
};

/// Ranks samples by angle around the embedding centroid. A point that falls
/// exactly on the centroid has no angle; by default that errors, or with
/// `perturb_at_center` it is assigned angle 0 and ranked with the rest.
OrderExtraction circular_order(const Embedding& e,
                               bool perturb_at_center = false);

/// Best Kendall tau between an extracted circular order and a ground-truth
/// order, maximized over all rotation offsets and both orientations (cyclic
/// order is only defined up to those).
double circular_tau(const OrderExtraction& extracted,
                    const std::vector<int>& truth_order);

/// Ranks samples by their projection onto the first principal axis of the
/// embedding.
OrderExtraction principal_order(const Embedding& e);

/// Kendall tau between a principal-axis order and the truth, maximized over
/// the two sign choices of the axis.
double principal_tau(const OrderExtraction& extracted,
                     const std::vector<int>& truth_order);

}  // namespace metaviz
