#include "metaviz/types.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace metaviz {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MismatchedSampleCount: return "MismatchedSampleCount";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::MixedSampleIndex: return "MixedSampleIndex";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AlreadySymmetrized: return "AlreadySymmetrized";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::UnsupportedMethod: return "UnsupportedMethod";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedCloud: return "MalformedCloud";
    case ErrorCode::DegenerateTruth: return "DegenerateTruth";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::SingletonCluster: return "SingletonCluster";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::PointAtCenter: return "PointAtCenter";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InconsistentColumnCount: return "InconsistentColumnCount";
    case ErrorCode::WriteError: return "WriteError";
  }
  return "UnknownError";
}

Embedding::Embedding(std::string name, Matrix coords)
    : name_(std::move(name)), coords_(std::move(coords)) {
  if (coords_.rows() < 2) {
    fail(ErrorCode::EmptySet,
         "embedding '" + name_ + "' needs at least 2 samples, got " +
             std::to_string(coords_.rows()));
  }
  if (coords_.cols() < 1) {
    fail(ErrorCode::EmptySet, "embedding '" + name_ + "' has no coordinates");
  }
  if (!coords_.allFinite()) {
    fail(ErrorCode::NonFiniteCoordinate,
         "embedding '" + name_ + "' contains a non-finite coordinate");
  }
}

CandidateSet::CandidateSet(std::vector<Embedding> candidates)
    : candidates_(std::move(candidates)) {
  if (candidates_.empty()) {
    fail(ErrorCode::EmptySet, "candidate set is empty");
  }
  std::ostringstream problems;
  const Index n = candidates_.front().n();
  std::unordered_set<std::string> seen;
  for (const auto& c : candidates_) {
    if (c.n() != n) {
      problems << " candidate '" << c.name() << "' has n=" << c.n()
               << " but expected n=" << n << ";";
    }
    if (!seen.insert(c.name()).second) {
      problems << " duplicate candidate name '" << c.name() << "';";
    }
  }
  const std::string msg = problems.str();
  if (!msg.empty()) {
    // Report the first category that applies; the message carries everything.
    if (msg.find("expected n=") != std::string::npos) {
      fail(ErrorCode::MismatchedSampleCount, msg);
    }
    fail(ErrorCode::DuplicateName, msg);
  }
}

std::vector<std::string> CandidateSet::names() const {
  std::vector<std::string> out;
  out.reserve(candidates_.size());
  for (const auto& c : candidates_) out.push_back(c.name());
  return out;
}

const CandidateSet& validate_candidate_set(const CandidateSet& set) {
  // Embedding and CandidateSet constructors enforce all invariants, so an
  // existing instance is valid by construction; this re-walks them anyway so
  // callers holding a set from any source get a checked hand-off.
  std::ostringstream problems;
  const Index n = set.n();
  std::unordered_set<std::string> seen;
  for (const auto& c : set.candidates()) {
    if (!c.coords().allFinite()) {
      problems << " candidate '" << c.name() << "' has non-finite coords;";
    }
    if (c.n() != n) {
      problems << " candidate '" << c.name() << "' has n=" << c.n()
               << " but expected n=" << n << ";";
    }
    if (!seen.insert(c.name()).second) {
      problems << " duplicate candidate name '" << c.name() << "';";
    }
  }
  const std::string msg = problems.str();
  if (!msg.empty()) {
    if (msg.find("non-finite") != std::string::npos) {
      fail(ErrorCode::NonFiniteCoordinate, msg);
    }
    if (msg.find("expected n=") != std::string::npos) {
      fail(ErrorCode::MismatchedSampleCount, msg);
    }
    fail(ErrorCode::DuplicateName, msg);
  }
  return set;
}

NormalizedDistanceRow::NormalizedDistanceRow(Index sample, Vector values,
                                             bool degenerate)
    : sample_(sample), values_(std::move(values)), degenerate_(degenerate) {
  if (sample_ < 0 || sample_ >= values_.size()) {
    fail(ErrorCode::IndexOutOfRange,
         "sample index " + std::to_string(sample_) + " outside row of length " +
             std::to_string(values_.size()));
  }
  if (!values_.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "normalized row has non-finite entries");
  }
  if ((values_.array() < 0.0).any()) {
    fail(ErrorCode::NegativeEntry, "normalized row has negative entries");
  }
  if (values_(sample_) != 0.0) {
    fail(ErrorCode::IndexOutOfRange, "self-distance must be zero at index " +
                                         std::to_string(sample_));
  }
  const double norm = values_.norm();
  if (degenerate_) {
    if (norm != 0.0) {
      fail(ErrorCode::ShapeMismatch, "degenerate row must be all zero");
    }
  } else if (std::abs(norm - 1.0) > 1e-12) {
    fail(ErrorCode::ShapeMismatch,
         "non-degenerate row norm deviates from 1 by " +
             std::to_string(std::abs(norm - 1.0)));
  }
}

GramMatrix::GramMatrix(Index sample, Matrix entries,
                       std::vector<bool> degenerate)
    : sample_(sample),
      entries_(std::move(entries)),
      degenerate_(std::move(degenerate)) {
  const Index k = entries_.rows();
  if (entries_.cols() != k || k < 1) {
    fail(ErrorCode::ShapeMismatch, "Gram matrix must be square and non-empty");
  }
  if (static_cast<Index>(degenerate_.size()) != k) {
    fail(ErrorCode::ShapeMismatch, "degeneracy mask size mismatch");
  }
  if (!entries_.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "Gram matrix has non-finite entries");
  }
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::NotSymmetric, "Gram matrix asymmetry exceeds 1e-12");
  }
  if (entries_.minCoeff() < -1e-12 || entries_.maxCoeff() > 1.0 + 1e-12) {
    fail(ErrorCode::ShapeMismatch, "Gram entries must lie in [0, 1]");
  }
  for (Index j = 0; j < k; ++j) {
    const double expected = degenerate_[static_cast<size_t>(j)] ? 0.0 : 1.0;
    if (std::abs(entries_(j, j) - expected) > 1e-12) {
      fail(ErrorCode::ShapeMismatch,
           "Gram diagonal entry " + std::to_string(j) + " should be " +
               std::to_string(expected));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_,
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * static_cast<double>(k)) {
    fail(ErrorCode::ShapeMismatch, "Gram matrix is not positive semi-definite");
  }
}

EigenscoreMatrix::EigenscoreMatrix(Matrix scores) : scores_(std::move(scores)) {
  if (scores_.rows() < 1 || scores_.cols() < 1) {
    fail(ErrorCode::ShapeMismatch, "eigenscore matrix must be non-empty");
  }
  if (!scores_.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "eigenscores must be finite");
  }
  if (scores_.minCoeff() < 0.0) {
    fail(ErrorCode::NegativeEntry, "eigenscores must be nonnegative");
  }
  for (Index i = 0; i < scores_.rows(); ++i) {
    if (std::abs(scores_.row(i).norm() - 1.0) > 1e-10) {
      fail(ErrorCode::ShapeMismatch,
           "eigenscore row " + std::to_string(i) + " is not unit norm");
    }
  }
}

MetaDistance::MetaDistance(Matrix rows, bool symmetrized)
    : rows_(std::move(rows)), symmetrized_(symmetrized) {
  if (rows_.rows() != rows_.cols() || rows_.rows() < 1) {
    fail(ErrorCode::ShapeMismatch, "meta-distance must be square");
  }
  if (!rows_.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "meta-distance has non-finite entries");
  }
  if (rows_.minCoeff() < 0.0) {
    fail(ErrorCode::NegativeEntry, "meta-distance has negative entries");
  }
  if (rows_.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    fail(ErrorCode::ShapeMismatch, "meta-distance diagonal must be zero");
  }
  if (symmetrized_ &&
      (rows_ - rows_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::NotSymmetric,
         "symmetrized meta-distance deviates from symmetry");
  }
}

void SyntheticScene::validate() const {
  if (signals.rows() != data.rows() || signals.cols() != data.cols()) {
    fail(ErrorCode::ShapeMismatch, "signals and data shapes differ");
  }
  if (!signals.allFinite() || !data.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "scene matrices must be finite");
  }
  if (labels) {
    if (static_cast<Index>(labels->size()) != n()) {
      fail(ErrorCode::LengthMismatch, "labels length differs from n");
    }
    std::unordered_map<int, int> counts;
    for (int label : *labels) ++counts[label];
    for (const auto& [label, count] : counts) {
      if (count < 2) {
        fail(ErrorCode::SingletonCluster,
             "cluster " + std::to_string(label) + " has fewer than 2 members");
      }
    }
  }
  if (true_order && static_cast<Index>(true_order->size()) != n()) {
    fail(ErrorCode::LengthMismatch, "true_order length differs from n");
  }
}

namespace {

// Full triangle check is cubic; past a small n, verify a seeded subsample of
// triples instead.
void check_triangle_inequality(const Matrix& d) {
  const Index n = d.rows();
  const double tol = 1e-9;
  auto check = [&](Index a, Index b, Index c) {
    if (d(a, c) > d(a, b) + d(b, c) + tol) {
      fail(ErrorCode::ShapeMismatch,
           "triangle inequality violated at (" + std::to_string(a) + "," +
               std::to_string(b) + "," + std::to_string(c) + ")");
    }
  };
  if (n <= 128) {
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        for (Index c = 0; c < n; ++c) check(a, b, c);
    return;
  }
  std::mt19937_64 rng(0x7472694d564dULL);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (int t = 0; t < 200000; ++t) check(pick(rng), pick(rng), pick(rng));
}

}  // namespace

GroundTruthDistance::GroundTruthDistance(Matrix raw, Matrix normalized)
    : raw_(std::move(raw)), normalized_(std::move(normalized)) {
  const Index n = raw_.rows();
  if (raw_.cols() != n || normalized_.rows() != n || normalized_.cols() != n) {
    fail(ErrorCode::ShapeMismatch, "ground-truth matrices must be square n x n");
  }
  if (!raw_.allFinite() || !normalized_.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "ground-truth matrices must be finite");
  }
  if (raw_.minCoeff() < 0.0) {
    fail(ErrorCode::NegativeEntry, "raw distances must be nonnegative");
  }
  if (raw_.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    fail(ErrorCode::ShapeMismatch, "raw distance diagonal must be zero");
  }
  if ((raw_ - raw_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::NotSymmetric, "raw distances must be symmetric");
  }
  check_triangle_inequality(raw_);
  for (Index i = 0; i < n; ++i) {
    const double norm = normalized_.row(i).norm();
    const bool degenerate = raw_.row(i).norm() == 0.0;
    if (degenerate) {
      if (norm != 0.0) {
        fail(ErrorCode::ShapeMismatch,
             "normalized row for a degenerate raw row must be zero");
      }
    } else if (std::abs(norm - 1.0) > 1e-12) {
      fail(ErrorCode::ShapeMismatch,
           "normalized truth row " + std::to_string(i) + " is not unit norm");
    }
  }
}

DistortionModel::DistortionModel(double sigma, Matrix correlation,
                                 Matrix scales, int adversarial_count)
    : sigma_(sigma),
      correlation_(std::move(correlation)),
      scales_(std::move(scales)),
      adversarial_count_(adversarial_count) {
  if (!(sigma_ > 0.0)) {
    fail(ErrorCode::InvalidModel, "sigma must be positive");
  }
  const Index k = correlation_.rows();
  if (correlation_.cols() != k || k < 1) {
    fail(ErrorCode::InvalidModel, "correlation matrix must be square");
  }
  if ((correlation_ - correlation_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::InvalidModel, "correlation matrix must be symmetric");
  }
  if ((correlation_.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) {
    fail(ErrorCode::InvalidModel, "correlation diagonal must be 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(correlation_);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * static_cast<double>(k)) {
    fail(ErrorCode::InvalidModel, "correlation matrix must be PSD");
  }
  rho_ = es.eigenvalues().cwiseAbs().maxCoeff();
  if (rho_ > static_cast<double>(k) + 1e-9) {
    fail(ErrorCode::InvalidModel, "spectral norm of R cannot exceed K");
  }
  if (scales_.cols() != k) {
    fail(ErrorCode::InvalidModel, "scales must have K columns");
  }
  if (scales_.rows() < 1 || !(scales_.minCoeff() > 0.0)) {
    fail(ErrorCode::InvalidModel, "scales must be positive");
  }
  if (adversarial_count_ < 0 || adversarial_count_ >= k) {
    fail(ErrorCode::InvalidModel,
         "adversarial count must lie in [0, K)");
  }
}

}  // namespace metaviz
