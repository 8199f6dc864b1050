#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sctree/exec.hpp"
#include "sctree/gateway.hpp"
#include "sctree/tree.hpp"

namespace sctree {

class Diagnostics;

// Sentence BLEU over pre-tokenised input: clipped n-gram precisions for n = 1..4 with uniform
// weights, brevity penalty exp(1 - r/h) when h < r. A precision with zero matches uses a
// numerator of 0.1; orders for which the hypothesis has no n-grams are dropped and the remaining
// weights renormalised. Empty hypothesis or reference scores 0.
double bleu(std::span<const std::string_view> hypothesis, std::span<const std::string_view> reference);
// Whitespace tokenisation, no case folding.
double bleu(std::string_view hypothesis, std::string_view reference);

// max(0, cos(a, b)); 0 when either vector is zero. Throws ConfigError on dimension mismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Unit-cost edit distance over Unicode code points.
std::size_t levenshtein(std::string_view a, std::string_view b);
// 1 - distance / max(len a, len b); 1 for two empty strings.
double levenshtein_ratio(std::string_view a, std::string_view b);

struct SimilarityMetric {
  enum class Kind { embedding_cosine, bleu, levenshtein_ratio };

  Kind kind = Kind::embedding_cosine;
  // BLEU only: average both directions instead of reference=earlier, hypothesis=later.
  bool symmetric_bleu = false;

  // "embedding", "bleu", "levenshtein". Throws ConfigError.
  static SimilarityMetric parse(std::string_view name);
  std::string name() const;

  friend bool operator==(const SimilarityMetric&, const SimilarityMetric&) = default;
};

// Computes node-pair, path, tree and forest consistency. Transcripts are cached per
// (content, inputs), so repeated nodes are executed once. Wrap the embedder in a
// CachingEmbedder to memoise embeddings too.
class Scorer {
 public:
  struct Options {
    std::chrono::milliseconds case_timeout = kDefaultCaseTimeout;
    // Distinct nodes of a tree executed concurrently.
    std::size_t max_parallel = 1;
  };

  Scorer(const ExecHarness& harness, EmbeddingClient* embedder, Diagnostics* diagnostics = nullptr);
  Scorer(const ExecHarness& harness, EmbeddingClient* embedder, Diagnostics* diagnostics,
         Options options);

  ExecTranscript transcript(const Node& node, TaskKind kind);

  // Metric over two concatenated transcripts; `reference` is the earlier node.
  double transcript_similarity(std::string_view reference, std::string_view hypothesis,
                               const SimilarityMetric& metric);

  // Requires equal inputs (throws ConfigError otherwise). Harness errors propagate; backend
  // failures while scoring become 0 plus a diagnostic.
  double node_pair_similarity(const Node& reference, const Node& hypothesis, TaskKind kind,
                              const SimilarityMetric& metric);

  // C(P): similarity between the first and last node of the path.
  double path_consistency(const Tree& tree, const Path& path, const SimilarityMetric& metric);

  // C_n(T): mean of C(P) over enumerate_paths(tree, n, anchor).
  double tree_consistency(const Tree& tree, int n, PathAnchor anchor, const SimilarityMetric& metric);

  // {C_1(T), ..., C_nmax(T)}.
  std::vector<double> tree_profile(const Tree& tree, int n_max, PathAnchor anchor,
                                   const SimilarityMetric& metric);

  // C_n(F): mean of C_n(T) over the forest's trees.
  double forest_consistency(const Forest& forest, int n, PathAnchor anchor,
                            const SimilarityMetric& metric);

  // Similarity of every node to the root, keyed by node id.
  std::map<std::string, double> similarity_to_root(const Tree& tree, const SimilarityMetric& metric);

 private:
  std::string score_key(const Node& node) const;
  void warm(const Tree& tree, std::span<const std::string> ids);

  const ExecHarness& harness_;
  EmbeddingClient* embedder_;
  Diagnostics* diagnostics_;
  Options options_;
  std::mutex mutex_;
  std::unordered_map<std::string, ExecTranscript> transcripts_;
};

double mean(std::span<const double> values);

struct RunStats {
  double mean = 0.0;
  // Sample standard deviation (R - 1 denominator); 0 for a single run.
  double std = 0.0;
  std::size_t runs = 0;

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

RunStats aggregate_runs(std::span<const double> values);

// Renders fractional stats as a percent cell with one decimal: {0.98, 0.0} -> "98.0±0.0".
std::string format_percent_cell(const RunStats& stats);

}  // namespace sctree
