#include "metaviz/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace metaviz {

double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    fail(ErrorCode::LengthMismatch, "vectors differ in length");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    fail(ErrorCode::ZeroVector, "cosine of a zero vector is undefined");
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

ConcordanceResult mean_concordance(const Matrix& rows,
                                   const GroundTruthDistance& truth) {
  if (rows.rows() != truth.n() || rows.cols() != truth.n()) {
    fail(ErrorCode::ShapeMismatch,
         "rows must be n x n aligned with the ground truth");
  }
  ConcordanceResult result;
  double sum = 0.0;
  int used = 0;
  for (Index i = 0; i < rows.rows(); ++i) {
    if (truth.row_degenerate(i)) {
      ++result.skipped;
      continue;
    }
    const double norm = rows.row(i).norm();
    // A zero profile carries no concordance.
    if (norm > 0.0) {
      sum += rows.row(i).dot(truth.normalized().row(i)) / norm;
    }
    ++used;
  }
  if (used == 0) {
    fail(ErrorCode::AllDegenerate, "every ground-truth row is degenerate");
  }
  result.mean = sum / static_cast<double>(used);
  return result;
}

Vector silhouette(const Matrix& distances, const std::vector<int>& labels) {
  const Index n = distances.rows();
  if (distances.cols() != n || static_cast<Index>(labels.size()) != n) {
    fail(ErrorCode::ShapeMismatch, "distance matrix and labels disagree on n");
  }
  const double scale = std::max(1.0, distances.cwiseAbs().maxCoeff());
  if ((distances - distances.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    fail(ErrorCode::NotSymmetric, "silhouette needs a symmetric matrix");
  }

  std::map<int, std::vector<Index>> clusters;
  for (Index i = 0; i < n; ++i) clusters[labels[static_cast<size_t>(i)]].push_back(i);
  if (clusters.size() < 2) {
    fail(ErrorCode::SingleCluster, "silhouette needs at least two clusters");
  }
  for (const auto& [label, members] : clusters) {
    if (members.size() < 2) {
      fail(ErrorCode::SingletonCluster,
           "cluster " + std::to_string(label) + " has a single member");
    }
  }

  Vector si(n);
  for (Index i = 0; i < n; ++i) {
    const int own = labels[static_cast<size_t>(i)];
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, members] : clusters) {
      double sum = 0.0;
      for (Index j : members) sum += distances(i, j);
      if (label == own) {
        a = sum / static_cast<double>(members.size() - 1);
      } else {
        b = std::min(b, sum / static_cast<double>(members.size()));
      }
    }
    const double denom = std::max(a, b);
    si(i) = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return si;
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::LengthMismatch, "rank vectors differ in length");
  }
  const size_t n = a.size();
  if (n < 2) {
    fail(ErrorCode::LengthMismatch, "need at least 2 items");
  }
  long long concordant = 0;
  long long discordant = 0;
  long long ties_a = 0;
  long long ties_b = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) continue;
      if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((n0 + static_cast<double>(ties_a)) *
                                 (n0 + static_cast<double>(ties_b)));
  if (denom == 0.0) {
    fail(ErrorCode::ZeroVariance, "all pairs tied; tau undefined");
  }
  return static_cast<double>(concordant - discordant) / denom;
}

double kendall_tau(const Vector& a, const Vector& b) {
  return kendall_tau(std::vector<double>(a.data(), a.data() + a.size()),
                     std::vector<double>(b.data(), b.data() + b.size()));
}

namespace {

// Ranks values ascending; ties broken by sample index for determinism.
std::vector<int> rank_by(const std::vector<double>& keys) {
  const size_t n = keys.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (keys[static_cast<size_t>(lhs)] != keys[static_cast<size_t>(rhs)]) {
      return keys[static_cast<size_t>(lhs)] < keys[static_cast<size_t>(rhs)];
    }
    return lhs < rhs;
  });
  std::vector<int> ranks(n);
  for (size_t pos = 0; pos < n; ++pos) {
    ranks[static_cast<size_t>(order[pos])] = static_cast<int>(pos);
  }
  return ranks;
}

std::vector<double> to_double(const std::vector<int>& values) {
  return std::vector<double>(values.begin(), values.end());
}

}  // namespace

OrderExtraction circular_order(const Embedding& e, bool perturb_at_center) {
  if (e.dim() != 2) {
    fail(ErrorCode::InvalidConfig, "circular order needs a 2-D embedding");
  }
  const Matrix& x = e.coords();
  const Index n = e.n();
  const double cx = x.col(0).mean();
  const double cy = x.col(1).mean();
  double scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    scale = std::max(scale, std::hypot(x(i, 0) - cx, x(i, 1) - cy));
  }

  std::vector<double> angles(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double dx = x(i, 0) - cx;
    const double dy = x(i, 1) - cy;
    if (std::hypot(dx, dy) <= 1e-12 * std::max(scale, 1.0)) {
      if (!perturb_at_center) {
        fail(ErrorCode::PointAtCenter,
             "sample " + std::to_string(i) + " coincides with the centroid");
      }
      angles[static_cast<size_t>(i)] = 0.0;  // documented fallback angle
      continue;
    }
    angles[static_cast<size_t>(i)] = std::atan2(dy, dx);
  }

  OrderExtraction out;
  out.mode = OrderMode::Circular;
  out.angles = angles;
  out.order = rank_by(angles);
  return out;
}

double circular_tau(const OrderExtraction& extracted,
                    const std::vector<int>& truth_order) {
  if (extracted.mode != OrderMode::Circular) {
    fail(ErrorCode::ModeMismatch, "extraction is not circular");
  }
  const size_t n = extracted.order.size();
  if (truth_order.size() != n) {
    fail(ErrorCode::LengthMismatch, "truth order length differs");
  }
  const std::vector<double> truth = to_double(truth_order);
  double best = -1.0;
  const int ni = static_cast<int>(n);
  for (int orientation : {1, -1}) {
    for (int offset = 0; offset < ni; ++offset) {
      std::vector<double> shifted(n);
      for (size_t i = 0; i < n; ++i) {
        const int r = extracted.order[i] * orientation + offset;
        shifted[i] = static_cast<double>(((r % ni) + ni) % ni);
      }
      best = std::max(best, kendall_tau(shifted, truth));
    }
  }
  return best;
}

OrderExtraction principal_order(const Embedding& e) {
  const Matrix& x = e.coords();
  const Index n = e.n();
  Matrix centered = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  if (svd.singularValues()(0) <= 1e-14) {
    fail(ErrorCode::ZeroVariance, "embedding has no variance to order along");
  }
  Vector axis = svd.matrixV().col(0);
  Index amax = 0;
  axis.cwiseAbs().maxCoeff(&amax);
  if (axis(amax) < 0.0) axis = -axis;

  const Vector projections = centered * axis;
  OrderExtraction out;
  out.mode = OrderMode::Principal;
  out.order = rank_by(
      std::vector<double>(projections.data(), projections.data() + n));
  return out;
}

double principal_tau(const OrderExtraction& extracted,
                     const std::vector<int>& truth_order) {
  if (extracted.mode != OrderMode::Principal) {
    fail(ErrorCode::ModeMismatch, "extraction is not principal");
  }
  if (truth_order.size() != extracted.order.size()) {
    fail(ErrorCode::LengthMismatch, "truth order length differs");
  }
  const std::vector<double> ranks = to_double(extracted.order);
  const std::vector<double> truth = to_double(truth_order);
  std::vector<double> flipped(ranks.size());
  const double top = static_cast<double>(ranks.size() - 1);
  for (size_t i = 0; i < ranks.size(); ++i) flipped[i] = top - ranks[i];
  return std::max(kendall_tau(ranks, truth), kendall_tau(flipped, truth));
}

}  // namespace metaviz
