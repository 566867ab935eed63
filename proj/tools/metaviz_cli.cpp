// Command-line front end: score / combine / embed / simulate / evaluate /
// bench / pipeline. Exit codes: 0 success, 1 usage error, 2 data error.

#include <sys/resource.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "metaviz/embedders.hpp"
#include "metaviz/fusion.hpp"
#include "metaviz/geometry.hpp"
#include "metaviz/io.hpp"
#include "metaviz/metrics.hpp"
#include "metaviz/parallel.hpp"
#include "metaviz/pipeline.hpp"
#include "metaviz/rng.hpp"
#include "metaviz/simulation.hpp"
#include "metaviz/spectral.hpp"

namespace {

using namespace metaviz;
namespace fs = std::filesystem;

int threads_from_env() {
  const char* env = std::getenv("MVZ_THREADS");
  if (env == nullptr) return 0;
  try {
    return std::max(0, std::stoi(env));
  } catch (...) {
    return 0;
  }
}

long peak_rss_bytes() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss * 1024L;  // Linux reports KiB
}

struct CommonOpts {
  int threads = threads_from_env();
};

void add_threads_flag(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--threads", opts.threads,
                  "worker threads (0 = hardware; env MVZ_THREADS as fallback)");
}

SceneStructure parse_structure(const std::string& name) {
  if (name == "gaussian-mixture" || name == "g") {
    return SceneStructure::GaussianMixture;
  }
  if (name == "smiley") return SceneStructure::Smiley;
  if (name == "cloud" || name == "pointcloud") return SceneStructure::PointCloud;
  fail(ErrorCode::InvalidConfig, "unknown structure '" + name + "'");
}

void write_manifest(const std::vector<Embedding>& candidates,
                    const fs::path& dir, const fs::path& manifest_path) {
  nlohmann::json doc;
  doc["candidates"] = nlohmann::json::array();
  for (const auto& candidate : candidates) {
    const std::string filename = "candidate-" + candidate.name() + ".csv";
    save_embedding(candidate, (dir / filename).string());
    doc["candidates"].push_back(
        {{"name", candidate.name()}, {"path", filename}, {"format", "csv"}});
  }
  doc["n"] = candidates.front().n();
  std::ofstream out(manifest_path);
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorCode::WriteError, "cannot write " + manifest_path.string());
}

int run_score(const std::string& manifest_path, const std::string& out_path,
              int threads) {
  const Manifest manifest = load_manifest(manifest_path);
  const CandidateSet set = load_candidate_set(manifest);
  const EigenscoreMatrix scores = eigenscore_matrix(set, threads);
  save_scores(scores, set.names(), out_path);
  std::cout << "wrote " << out_path << " (" << scores.n() << " samples x "
            << scores.k() << " candidates)\n";
  return 0;
}

int run_combine(const std::string& manifest_path, const std::string& out_path,
                bool naive, const std::string& scores_path, bool csv,
                bool do_symmetrize, int threads) {
  const Manifest manifest = load_manifest(manifest_path);
  const CandidateSet set = load_candidate_set(manifest);
  MetaDistance meta = [&] {
    if (naive) return naive_meta_distance(set, threads);
    if (!scores_path.empty()) {
      const LoadedScores loaded = load_scores(scores_path);
      return spectral_meta_distance(set, EigenscoreMatrix(loaded.scores),
                                    threads);
    }
    return assess_and_combine(set, threads).meta;
  }();
  if (do_symmetrize) meta = symmetrize(meta);
  save_distance(meta, out_path, !csv);
  std::cout << "wrote " << out_path << " (n=" << meta.n()
            << (meta.symmetrized() ? ", symmetrized" : "") << ")\n";
  return 0;
}

int run_embed(const std::string& distance_path, const std::string& method,
              double sigma, Index knn, Index dim,
              const std::string& out_path) {
  const MetaDistance meta = load_distance(distance_path);
  EmbedderConfig cfg;
  cfg.method = parse_embed_method(method);
  cfg.sigma = sigma;
  cfg.knn = knn;
  cfg.dim = dim;
  EmbedInfo info;
  const Embedding embedding = meta_embed(meta, cfg, &info);
  if (info.auto_symmetrized) {
    std::cerr << "notice: distance matrix was not symmetrized; applied "
                 "D + D^T before embedding\n";
  }
  if (info.disconnected) {
    std::cerr << "warning: neighborhood graph disconnected ("
              << info.components << " components); embedded the largest\n";
  }
  save_embedding(embedding, out_path);
  std::cout << "wrote " << out_path << " (" << embedding.n() << " x "
            << embedding.dim() << ")\n";
  return 0;
}

int run_simulate(const SceneConfig& cfg, const std::string& out_dir,
                 Index candidates, int threads) {
  const SyntheticScene scene = generate_scene(cfg);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_matrix_csv(scene.data, (dir / "data.csv").string());
  save_matrix_csv(scene.signals, (dir / "signals.csv").string());
  if (scene.labels) {
    save_int_column(*scene.labels, (dir / "labels.csv").string());
  }
  nlohmann::json meta{{"structure", static_cast<int>(cfg.structure)},
                      {"n", scene.n()},
                      {"p", scene.p()},
                      {"r", scene.r},
                      {"theta", scene.theta},
                      {"seed", scene.seed}};
  std::ofstream scene_json(dir / "scene.json");
  scene_json << meta.dump(2) << '\n';
  if (!scene_json) {
    fail(ErrorCode::WriteError, "cannot write scene.json");
  }
  std::cout << "wrote scene to " << out_dir << " (n=" << scene.n()
            << ", p=" << scene.p() << ")\n";

  if (candidates > 0) {
    const auto pool = diverse_candidates(scene.data, candidates, cfg.seed);
    write_manifest(pool, dir, dir / "manifest.json");
    std::cout << "wrote " << pool.size() << " candidate visualizations and "
              << (dir / "manifest.json").string() << '\n';
  }
  (void)threads;
  return 0;
}

Matrix profile_rows_for_evaluate(const std::string& embedding_path,
                                 const std::string& distance_path) {
  if (!embedding_path.empty()) {
    const Embedding e = load_embedding(embedding_path, "embedding");
    return full_normalized_matrix(e);
  }
  return load_distance(distance_path).rows();
}

int run_evaluate(const std::string& metric, const std::string& truth_path,
                 const std::string& embedding_path,
                 const std::string& distance_path) {
  if (metric == "concordance") {
    const Matrix signals = load_matrix_csv(truth_path);
    SyntheticScene scene;
    scene.signals = signals;
    scene.data = signals;
    const GroundTruthDistance truth = ground_truth(scene);
    const Matrix rows = profile_rows_for_evaluate(embedding_path, distance_path);
    const ConcordanceResult result = mean_concordance(rows, truth);
    std::cout << "mean_concordance=" << result.mean << '\n';
    if (result.skipped > 0) {
      std::cout << "skipped_degenerate_truth_rows=" << result.skipped << '\n';
    }
    return 0;
  }
  if (metric == "silhouette") {
    const std::vector<int> labels = load_int_column(truth_path);
    Matrix distances;
    if (!embedding_path.empty()) {
      distances =
          raw_distance_matrix(load_embedding(embedding_path, "embedding").coords());
    } else {
      MetaDistance meta = load_distance(distance_path);
      if (!meta.symmetrized()) {
        std::cerr << "notice: symmetrizing distance matrix for silhouette\n";
        meta = symmetrize(meta);
      }
      distances = meta.rows();
    }
    const Vector si = silhouette(distances, labels);
    std::vector<double> sorted(si.data(), si.data() + si.size());
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::cout << "median_silhouette=" << median << '\n';
    std::cout << "mean_silhouette=" << si.mean() << '\n';
    return 0;
  }
  if (metric == "tau-circular" || metric == "tau-principal") {
    if (embedding_path.empty()) {
      fail(ErrorCode::InvalidConfig, "order metrics need --embedding");
    }
    const std::vector<int> truth_order = load_int_column(truth_path);
    const Embedding e = load_embedding(embedding_path, "embedding");
    if (metric == "tau-circular") {
      const OrderExtraction extraction = circular_order(e);
      std::cout << "tau_circular=" << circular_tau(extraction, truth_order)
                << '\n';
    } else {
      const OrderExtraction extraction = principal_order(e);
      std::cout << "tau_principal=" << principal_tau(extraction, truth_order)
                << '\n';
    }
    return 0;
  }
  fail(ErrorCode::InvalidConfig, "unknown metric '" + metric + "'");
}

int run_bench(Index n, Index k, int threads, std::uint64_t seed) {
  if (n < 2 || k < 1) {
    fail(ErrorCode::InvalidConfig, "bench needs n >= 2 and k >= 1");
  }
  // Candidate pool: random projections of a seeded Gaussian cloud. The work
  // being measured is steps 1-3 (distances, eigenscores, meta rows).
  auto rng = make_rng(seed, 0x42454e43ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix cloud(n, 6);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < 6; ++j) cloud(i, j) = normal(rng);
  std::vector<Embedding> pool;
  pool.reserve(static_cast<size_t>(k));
  for (Index c = 0; c < k; ++c) {
    pool.push_back(random_projection_embed(cloud, 2, seed + 1 + static_cast<std::uint64_t>(c),
                                           "rp-" + std::to_string(c)));
  }
  const CandidateSet set(std::move(pool));

  const auto start = std::chrono::steady_clock::now();
  const AssessCombineResult result = assess_and_combine(set, threads);
  const auto stop = std::chrono::steady_clock::now();
  const double seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(stop - start)
          .count();

  std::cout << "n=" << n << " k=" << k
            << " threads=" << resolve_thread_count(threads) << '\n';
  std::cout << "score_combine_seconds=" << seconds << '\n';
  std::cout << "meta_bytes=" << 8 * result.meta.n() * result.meta.n() << '\n';
  std::cout << "peak_rss_bytes=" << peak_rss_bytes() << '\n';
  return 0;
}

int run_pipeline(const std::string& manifest_path, const std::string& out_dir,
                 const std::string& method, const std::string& labels_path,
                 bool do_symmetrize, double sigma, Index knn, Index dim,
                 int threads) {
  const Manifest manifest = load_manifest(manifest_path);
  const CandidateSet set = load_candidate_set(manifest);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const AssessCombineResult result = assess_and_combine(set, threads);
  save_scores(result.scores, set.names(), (dir / "scores.csv").string());

  MetaDistance meta = do_symmetrize ? symmetrize(result.meta)
                                    : MetaDistance(result.meta);
  save_distance(meta, (dir / "meta.bin").string(), true);

  // Default meta-visualization method: Laplacian eigenmap for labeled
  // (cluster) scenes, kernel PCA otherwise.
  EmbedderConfig cfg;
  if (method == "auto") {
    cfg.method = labels_path.empty() ? EmbedMethod::GaussianKpca
                                     : EmbedMethod::LaplacianEigenmap;
  } else {
    cfg.method = parse_embed_method(method);
  }
  cfg.sigma = sigma;
  cfg.knn = knn;
  cfg.dim = dim;
  EmbedInfo info;
  const Embedding embedding = meta_embed(meta, cfg, &info);
  if (info.disconnected) {
    std::cerr << "warning: neighborhood graph disconnected ("
              << info.components << " components); embedded the largest\n";
  }
  save_embedding(embedding, (dir / "embedding.csv").string());
  std::cout << "wrote scores.csv, meta.bin, embedding.csv under " << out_dir
            << " (method " << embed_method_name(cfg.method) << ")\n";

  if (!labels_path.empty()) {
    const std::vector<int> labels = load_int_column(labels_path);
    const Vector si =
        silhouette(raw_distance_matrix(embedding.coords()), labels);
    std::vector<double> sorted(si.data(), si.data() + si.size());
    std::sort(sorted.begin(), sorted.end());
    const size_t count = sorted.size();
    const double median = count % 2 == 1
                              ? sorted[count / 2]
                              : 0.5 * (sorted[count / 2 - 1] + sorted[count / 2]);
    std::cout << "meta_median_silhouette=" << median << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spectral assessment and combination of multiple data visualizations"};
  app.require_subcommand(1);

  // score
  auto* score = app.add_subcommand("score", "per-sample candidate eigenscores");
  std::string score_manifest, score_out;
  CommonOpts score_opts;
  score->add_option("--manifest", score_manifest, "candidate manifest JSON")
      ->required();
  score->add_option("--out", score_out, "output scores CSV")->required();
  add_threads_flag(score, score_opts);

  // combine
  auto* combine = app.add_subcommand("combine", "build the meta-distance");
  std::string combine_manifest, combine_out, combine_scores;
  bool combine_naive = false, combine_csv = false, combine_symmetrize = false;
  CommonOpts combine_opts;
  combine->add_option("--manifest", combine_manifest, "candidate manifest JSON")
      ->required();
  combine->add_option("--out", combine_out, "output distance file")->required();
  combine->add_flag("--naive", combine_naive,
                    "uniform weights instead of eigenscores");
  combine->add_option("--scores", combine_scores,
                      "reuse a scores CSV instead of recomputing");
  combine->add_flag("--csv", combine_csv, "write CSV instead of binary");
  combine->add_flag("--symmetrize", combine_symmetrize,
                    "store D + D^T instead of the raw row-weighted matrix");
  add_threads_flag(combine, combine_opts);

  // embed
  auto* embed = app.add_subcommand("embed", "embed a (meta-)distance matrix");
  std::string embed_distance, embed_method, embed_out;
  double embed_sigma = 0.0;
  Index embed_knn = 15, embed_dim = 2;
  embed->add_option("--distance", embed_distance, "distance file (bin or csv)")
      ->required();
  embed->add_option("--method", embed_method, "kpca | mds | leim")->required();
  embed->add_option("--sigma", embed_sigma, "kpca width (default: median)");
  embed->add_option("--knn", embed_knn, "leim neighbor count");
  embed->add_option("--dim", embed_dim, "embedding dimension");
  embed->add_option("--out", embed_out, "output embedding CSV")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scene");
  std::string sim_structure, sim_out_dir, sim_cloud;
  SceneConfig sim_cfg;
  Index sim_candidates = 0;
  CommonOpts sim_opts;
  simulate->add_option("--structure", sim_structure,
                       "gaussian-mixture | smiley | cloud")
      ->required();
  simulate->add_option("--n", sim_cfg.n, "sample count")->required();
  simulate->add_option("--p", sim_cfg.p, "ambient dimension")->required();
  simulate->add_option("--r", sim_cfg.r, "intrinsic dimension (mixture)");
  simulate->add_option("--theta", sim_cfg.theta, "SNR / diameter parameter")
      ->required();
  simulate->add_option("--seed", sim_cfg.seed, "RNG seed")->required();
  simulate->add_option("--out-dir", sim_out_dir, "output directory")->required();
  simulate->add_option("--cloud", sim_cloud, "3-D point cloud file (cloud)");
  simulate->add_option("--candidates", sim_candidates,
                       "also write this many diverse candidate embeddings "
                       "plus manifest.json");
  add_threads_flag(simulate, sim_opts);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score an artifact");
  std::string eval_metric, eval_truth, eval_embedding, eval_distance;
  evaluate
      ->add_option("--metric", eval_metric,
                   "concordance | silhouette | tau-circular | tau-principal")
      ->required();
  evaluate
      ->add_option("--truth", eval_truth,
                   "signals CSV (concordance), labels file (silhouette) or "
                   "order file (tau-*)")
      ->required();
  evaluate->add_option("--embedding", eval_embedding, "embedding CSV input");
  evaluate->add_option("--distance", eval_distance, "distance file input");

  // bench
  auto* bench = app.add_subcommand("bench", "time scoring + fusion");
  Index bench_n = 2000, bench_k = 11;
  std::uint64_t bench_seed = 0;
  CommonOpts bench_opts;
  bench->add_option("--n", bench_n, "sample count");
  bench->add_option("--k", bench_k, "candidate count");
  bench->add_option("--seed", bench_seed, "RNG seed");
  add_threads_flag(bench, bench_opts);

  // pipeline
  auto* pipeline =
      app.add_subcommand("pipeline", "score + combine + embed in one run");
  std::string pipe_manifest, pipe_out_dir, pipe_method = "auto", pipe_labels;
  bool pipe_no_symmetrize = false;
  double pipe_sigma = 0.0;
  Index pipe_knn = 15, pipe_dim = 2;
  CommonOpts pipe_opts;
  pipeline->add_option("--manifest", pipe_manifest, "candidate manifest JSON")
      ->required();
  pipeline->add_option("--out-dir", pipe_out_dir, "output directory")
      ->required();
  pipeline->add_option("--method", pipe_method,
                       "auto | kpca | mds | leim (auto: leim when --labels "
                       "given, else kpca)");
  pipeline->add_option("--labels", pipe_labels,
                       "cluster labels; switches auto method to leim and "
                       "reports the meta embedding's median Silhouette");
  pipeline->add_flag("--no-symmetrize", pipe_no_symmetrize,
                     "skip the D + D^T symmetrization before embedding");
  pipeline->add_option("--sigma", pipe_sigma, "kpca width (default: median)");
  pipeline->add_option("--knn", pipe_knn, "leim neighbor count");
  pipeline->add_option("--dim", pipe_dim, "embedding dimension");
  add_threads_flag(pipeline, pipe_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 1;
  }

  try {
    if (score->parsed()) {
      return run_score(score_manifest, score_out, score_opts.threads);
    }
    if (combine->parsed()) {
      return run_combine(combine_manifest, combine_out, combine_naive,
                         combine_scores, combine_csv, combine_symmetrize,
                         combine_opts.threads);
    }
    if (embed->parsed()) {
      return run_embed(embed_distance, embed_method, embed_sigma, embed_knn,
                       embed_dim, embed_out);
    }
    if (simulate->parsed()) {
      sim_cfg.structure = parse_structure(sim_structure);
      sim_cfg.pointcloud_path = sim_cloud;
      return run_simulate(sim_cfg, sim_out_dir, sim_candidates,
                          sim_opts.threads);
    }
    if (evaluate->parsed()) {
      if (eval_embedding.empty() == eval_distance.empty()) {
        std::cerr << "evaluate needs exactly one of --embedding / --distance\n";
        return 1;
      }
      return run_evaluate(eval_metric, eval_truth, eval_embedding,
                          eval_distance);
    }
    if (bench->parsed()) {
      return run_bench(bench_n, bench_k, bench_opts.threads, bench_seed);
    }
    if (pipeline->parsed()) {
      return run_pipeline(pipe_manifest, pipe_out_dir, pipe_method, pipe_labels,
                          !pipe_no_symmetrize, pipe_sigma, pipe_knn, pipe_dim,
                          pipe_opts.threads);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
