#include "metaviz/spectral.hpp"

#include <cmath>

#include "metaviz/geometry.hpp"
#include "metaviz/parallel.hpp"

namespace metaviz {

namespace {

constexpr double kRayleighTol = 1e-12;
constexpr int kMaxPowerIterations = 10000;

void require_symmetric(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() < 1) {
    fail(ErrorCode::ShapeMismatch, "matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    fail(ErrorCode::NotSymmetric, "eigensolver input is not symmetric");
  }
}

// Cyclic Jacobi sweeps; fine for the K x K matrices this module sees.
void jacobi_eigen(const Matrix& g, Vector& eigenvalues, Matrix& vectors) {
  const Index k = g.rows();
  Matrix a = g;
  vectors = Matrix::Identity(k, k);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < k; ++p)
      for (Index q = p + 1; q < k; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (Index p = 0; p < k; ++p) {
      for (Index q = p + 1; q < k; ++q) {
        if (std::abs(a(p, q)) <= 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index r = 0; r < k; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Index r = 0; r < k; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (Index r = 0; r < k; ++r) {
          const double vrp = vectors(r, p);
          const double vrq = vectors(r, q);
          vectors(r, p) = c * vrp - s * vrq;
          vectors(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  eigenvalues = a.diagonal();
}

// Rough second-eigenvalue estimate for the gap flag: power iteration on the
// deflated matrix from a fixed alternating start.
double estimate_second_eigenvalue(const Matrix& g, double lambda1,
                                  const Vector& u) {
  const Index k = g.rows();
  if (k < 2) return -std::numeric_limits<double>::infinity();
  Vector v(k);
  for (Index j = 0; j < k; ++j) v(j) = (j % 2 == 0) ? 1.0 : -1.0;
  v -= u * u.dot(v);
  double norm = v.norm();
  if (norm <= 1e-14) {
    v.setZero();
    v(0) = 1.0;
    v -= u * u.dot(v);
    norm = v.norm();
    if (norm <= 1e-14) return 0.0;
  }
  v /= norm;
  double lambda2 = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = g * v - lambda1 * (u.dot(v)) * u;
    w -= u * u.dot(w);  // re-orthogonalize against drift
    const double wn = w.norm();
    if (wn <= 1e-300) return 0.0;
    v = w / wn;
    const double next = v.dot(g * v);
    if (std::abs(next - lambda2) <= 1e-6 * std::max(std::abs(next), 1.0)) {
      return next;
    }
    lambda2 = next;
  }
  return lambda2;
}

}  // namespace

LeadingEigenpair leading_eigenpair(const Matrix& g) {
  require_symmetric(g);
  const Index k = g.rows();

  LeadingEigenpair out;
  out.vector = Vector::Constant(k, 1.0 / std::sqrt(static_cast<double>(k)));

  const double scale = g.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    out.eigenvalue = 0.0;
    out.report.converged = true;
    out.report.degenerate_gap = true;
    return out;
  }

  Vector u = out.vector;
  double lambda = u.dot(g * u);
  bool settled = false;
  int iterations = 0;
  for (; iterations < kMaxPowerIterations; ++iterations) {
    Vector w = g * u;
    const double wn = w.norm();
    if (wn == 0.0) {
      // u is an exact null vector; with PSD input this is the floor.
      lambda = 0.0;
      settled = true;
      break;
    }
    u = w / wn;
    const double next = u.dot(g * u);
    if (std::abs(next - lambda) <= kRayleighTol * std::max(std::abs(next), 1.0)) {
      lambda = next;
      settled = true;
      ++iterations;
      break;
    }
    lambda = next;
  }

  double residual = (g * u - lambda * u).norm();
  const double accept = 1e-10 * std::max(std::abs(lambda), 1.0);
  if (!settled || residual > accept) {
    // Degenerate or near-degenerate spectrum; do the dense decomposition.
    Vector eigenvalues;
    Matrix vectors;
    jacobi_eigen(g, eigenvalues, vectors);
    Index best = 0;
    for (Index j = 1; j < k; ++j) {
      if (eigenvalues(j) > eigenvalues(best)) best = j;
    }
    // Keep the power-iteration tie-break: if the stalled iterate already has
    // residual at the acceptance level within the top eigenspace, prefer it.
    Vector candidate = vectors.col(best);
    Index amax = 0;
    candidate.cwiseAbs().maxCoeff(&amax);
    if (candidate(amax) < 0.0) candidate = -candidate;
    const double cand_lambda = eigenvalues(best);
    const double cand_res = (g * candidate - cand_lambda * candidate).norm();
    if (cand_res < residual) {
      u = candidate;
      lambda = cand_lambda;
      residual = cand_res;
      out.report.used_fallback = true;
    }
  }

  out.vector = u;
  out.eigenvalue = lambda;
  out.report.eigenvalue = lambda;
  out.report.iterations = iterations;
  out.report.residual = residual;
  out.report.converged = residual <= 1e-10 * std::max(std::abs(lambda), 1.0);

  const double lambda2 = estimate_second_eigenvalue(g, lambda, u);
  out.report.degenerate_gap =
      lambda <= 0.0 || (lambda - lambda2) < 1e-9 * lambda;
  return out;
}

Matrix gram_from_rows(const Matrix& rows) {
  const Index k = rows.rows();
  Matrix g(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = a; b < k; ++b) {
      const double value = rows.row(a).dot(rows.row(b));
      g(a, b) = value;
      g(b, a) = value;
    }
  }
  return g;
}

Vector eigenscores_from_gram(const Matrix& g, EigenSolveReport* report) {
  LeadingEigenpair pair = leading_eigenpair(g);
  Vector scores = pair.vector.cwiseAbs();
  if (pair.eigenvalue == 0.0 && g.cwiseAbs().maxCoeff() == 0.0) {
    // Every candidate degenerate at this sample; nothing to rank.
    pair.report.uniform_fallback = true;
    scores = Vector::Constant(g.rows(),
                              1.0 / std::sqrt(static_cast<double>(g.rows())));
  }
  const double norm = scores.norm();
  if (norm > 0.0) scores /= norm;
  if (report != nullptr) *report = pair.report;
  return scores;
}

GramMatrix gram_matrix(const std::vector<NormalizedDistanceRow>& rows) {
  if (rows.empty()) {
    fail(ErrorCode::EmptySet, "need at least one normalized row");
  }
  const Index k = static_cast<Index>(rows.size());
  const Index n = rows.front().n();
  const Index sample = rows.front().sample();
  std::vector<bool> degenerate(static_cast<size_t>(k));
  for (Index a = 0; a < k; ++a) {
    const auto& row = rows[static_cast<size_t>(a)];
    if (row.sample() != sample) {
      fail(ErrorCode::MixedSampleIndex,
           "row " + std::to_string(a) + " is for sample " +
               std::to_string(row.sample()) + ", expected " +
               std::to_string(sample));
    }
    if (row.n() != n) {
      fail(ErrorCode::LengthMismatch,
           "row " + std::to_string(a) + " has length " + std::to_string(row.n()) +
               ", expected " + std::to_string(n));
    }
    degenerate[static_cast<size_t>(a)] = row.degenerate();
  }
  Matrix stack(k, n);
  for (Index a = 0; a < k; ++a) {
    stack.row(a) = rows[static_cast<size_t>(a)].values().transpose();
  }
  return GramMatrix(sample, gram_from_rows(stack), std::move(degenerate));
}

Vector eigenscores_for_sample(const GramMatrix& g, EigenSolveReport* report) {
  return eigenscores_from_gram(g.entries(), report);
}

Matrix sample_row_stack(const CandidateSet& set, Index i,
                        std::vector<bool>* degenerate) {
  const Index k = set.size();
  const Index n = set.n();
  Matrix stack(k, n);
  if (degenerate != nullptr) degenerate->assign(static_cast<size_t>(k), false);
  for (Index a = 0; a < k; ++a) {
    NormalizedDistanceRow row = normalized_distance_row(set.candidate(a), i);
    if (degenerate != nullptr) {
      (*degenerate)[static_cast<size_t>(a)] = row.degenerate();
    }
    stack.row(a) = row.values().transpose();
  }
  return stack;
}

EigenscoreMatrix eigenscore_matrix(const CandidateSet& set, int threads) {
  validate_candidate_set(set);
  const Index n = set.n();
  const Index k = set.size();
  Matrix scores(n, k);
  parallel_for_rows(static_cast<int>(n), threads, [&](int begin, int end) {
    std::vector<bool> degenerate;
    for (int i = begin; i < end; ++i) {
      try {
        const Matrix stack = sample_row_stack(set, i, &degenerate);
        scores.row(i) =
            eigenscores_from_gram(gram_from_rows(stack)).transpose();
      } catch (const Error& e) {
        fail(e.code(), "sample " + std::to_string(i) + ": " + e.what());
      }
    }
  });
  return EigenscoreMatrix(std::move(scores));
}

}  // namespace metaviz
