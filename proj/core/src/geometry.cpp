#include "metaviz/geometry.hpp"

#include <cmath>

namespace metaviz {

Vector distance_row(const Embedding& e, Index i) {
  const Index n = e.n();
  if (i < 0 || i >= n) {
    fail(ErrorCode::IndexOutOfRange,
         "sample " + std::to_string(i) + " outside [0, " + std::to_string(n) +
             ")");
  }
  const Matrix& x = e.coords();
  const Index d = x.cols();
  Vector out(n);
  for (Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Index c = 0; c < d; ++c) {
      const double diff = x(i, c) - x(j, c);
      acc += diff * diff;
    }
    out(j) = std::sqrt(acc);
  }
  out(i) = 0.0;
  return out;
}

NormalizedDistanceRow normalize_row(const Vector& row, Index sample) {
  if (!row.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "distance row has non-finite entries");
  }
  if ((row.array() < 0.0).any()) {
    fail(ErrorCode::NegativeEntry, "distance row has negative entries");
  }
  // Fixed-order accumulation keeps the norm bit-identical to the streaming
  // path regardless of scheduling.
  double sq = 0.0;
  for (Index j = 0; j < row.size(); ++j) sq += row(j) * row(j);
  const double norm = std::sqrt(sq);
  if (norm == 0.0) {
    return NormalizedDistanceRow(sample, Vector::Zero(row.size()), true);
  }
  Vector scaled(row.size());
  for (Index j = 0; j < row.size(); ++j) scaled(j) = row(j) / norm;
  return NormalizedDistanceRow(sample, std::move(scaled), false);
}

NormalizedDistanceRow normalized_distance_row(const Embedding& e, Index i) {
  return normalize_row(distance_row(e, i), i);
}

Matrix full_normalized_matrix(const Embedding& e) {
  const Index n = e.n();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    out.row(i) = normalized_distance_row(e, i).values().transpose();
  }
  return out;
}

Matrix raw_distance_matrix(const Matrix& points) {
  const Embedding view("points", points);
  const Index n = points.rows();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    out.row(i) = distance_row(view, i).transpose();
  }
  return out;
}

}  // namespace metaviz
