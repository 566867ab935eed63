#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metaviz/embedders.hpp"
#include "metaviz/types.hpp"

namespace metaviz {

struct ManifestEntry {
  std::string name;
  std::string path;   // resolved against the manifest's directory
  std::string format; // "csv"
};

/// Candidate inventory loaded from a JSON manifest:
/// {"candidates":[{"name":...,"path":...,"format":"csv"}], "n": optional}.
struct Manifest {
  std::vector<ManifestEntry> candidates;
  std::optional<Index> expected_n;
};

Manifest load_manifest(const std::string& path);
CandidateSet load_candidate_set(const Manifest& manifest);

/// CSV embedding: one sample per line, comma-separated reals, an optional
/// single header line detected by failing to parse as numbers.
Embedding load_embedding(const std::string& path, const std::string& name);

/// Writes coordinates with 17 significant digits (exact f64 round-trip),
/// always with '.' as the decimal point.
void save_embedding(const Embedding& e, const std::string& path);

void save_scores(const EigenscoreMatrix& scores,
                 const std::vector<std::string>& candidate_names,
                 const std::string& path);

struct LoadedScores {
  std::vector<std::string> names;
  Matrix scores;
};
LoadedScores load_scores(const std::string& path);

/// Meta-distance serialization. Binary layout: magic "MVDM", little-endian
/// u64 n, one flag byte (symmetrized), then n*n little-endian doubles in
/// row-major order -- 13 + 8 n^2 bytes total. `binary=false` writes CSV
/// instead (the symmetrized flag then lives in the consuming command's
/// hands; loading CSV assumes unsymmetrized unless the matrix is symmetric).
void save_distance(const MetaDistance& m, const std::string& path,
                   bool binary = true);
MetaDistance load_distance(const std::string& path);

/// Integer-per-line files (cluster labels, rank orders).
std::vector<int> load_int_column(const std::string& path);
void save_int_column(const std::vector<int>& values, const std::string& path);

/// Dense numeric CSV with no header.
Matrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const Matrix& m, const std::string& path);

/// Run-wide knobs shared by the CLI subcommands.
struct RunConfig {
  int threads = 0;            // 0 = hardware concurrency (or MVZ_THREADS)
  std::uint64_t seed = 0;
  std::string output_dir;
  bool symmetrize = true;
  EmbedderConfig embed;
  bool clamp = false;         // clamp negative model-(5) rows to zero
};

}  // namespace metaviz
