#include "sctree/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "sctree/diagnostics.hpp"
#include "sctree/errors.hpp"
#include "sctree/parallel.hpp"
#include "sctree/text.hpp"

namespace sctree {

namespace {

constexpr int kMaxNgramOrder = 4;
constexpr double kSmoothingEpsilon = 0.1;

std::string ngram_key(std::span<const std::string_view> tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = start; i < start + n; ++i) {
    if (i > start) key += '\x1f';
    key += tokens[i];
  }
  return key;
}

std::unordered_map<std::string, std::size_t> ngram_counts(std::span<const std::string_view> tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, n)];
  return counts;
}

}  // namespace

double bleu(std::span<const std::string_view> hypothesis, std::span<const std::string_view> reference) {
  if (hypothesis.empty() || reference.empty()) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= kMaxNgramOrder; ++n) {
    if (hypothesis.size() < n) break;
    const auto hyp_counts = ngram_counts(hypothesis, n);
    const auto ref_counts = ngram_counts(reference, n);
    std::size_t clipped = 0;
    for (const auto& [gram, count] : hyp_counts) {
      const auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    const double total = static_cast<double>(hypothesis.size() - n + 1);
    const double precision = clipped > 0 ? static_cast<double>(clipped) / total : kSmoothingEpsilon / total;
    log_sum += std::log(precision);
    ++orders;
  }
  const double h = static_cast<double>(hypothesis.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = h < r ? std::exp(1.0 - r / h) : 1.0;
  return std::clamp(brevity * std::exp(log_sum / orders), 0.0, 1.0);
}

double bleu(std::string_view hypothesis, std::string_view reference) {
  const auto hyp = text::split_whitespace(hypothesis);
  const auto ref = text::split_whitespace(reference);
  return bleu(std::span<const std::string_view>(hyp), std::span<const std::string_view>(ref));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.is_zero() || b.is_zero()) return 0.0;
  if (a.dim() != b.dim()) {
    throw ConfigError("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    norm_a += a.values[i] * a.values[i];
    norm_b += b.values[i] * b.values[i];
  }
  const double cosine = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(cosine, 0.0, 1.0);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const auto s = text::utf8_code_points(a);
  const auto t = text::utf8_code_points(b);
  if (s.empty()) return t.size();
  if (t.empty()) return s.size();
  std::vector<std::size_t> previous(t.size() + 1), current(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) previous[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    current[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t substitute = previous[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitute});
    }
    std::swap(previous, current);
  }
  return previous[t.size()];
}

double levenshtein_ratio(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(text::utf8_code_points(a).size(), text::utf8_code_points(b).size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

SimilarityMetric SimilarityMetric::parse(std::string_view name) {
  if (name == "embedding" || name == "embedding_cosine") return {Kind::embedding_cosine, false};
  if (name == "bleu") return {Kind::bleu, false};
  if (name == "bleu-symmetric") return {Kind::bleu, true};
  if (name == "levenshtein" || name == "levenshtein_ratio") return {Kind::levenshtein_ratio, false};
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected embedding|bleu|levenshtein)");
}

std::string SimilarityMetric::name() const {
  switch (kind) {
    case Kind::embedding_cosine: return "embedding";
    case Kind::bleu: return symmetric_bleu ? "bleu-symmetric" : "bleu";
    case Kind::levenshtein_ratio: return "levenshtein";
  }
  return "embedding";
}

Scorer::Scorer(const ExecHarness& harness, EmbeddingClient* embedder, Diagnostics* diagnostics)
    : Scorer(harness, embedder, diagnostics, Options{}) {}

Scorer::Scorer(const ExecHarness& harness, EmbeddingClient* embedder, Diagnostics* diagnostics, Options options)
    : harness_(harness), embedder_(embedder), diagnostics_(diagnostics), options_(options) {}

std::string Scorer::score_key(const Node& node) const {
  std::string key;
  for (const auto& input : node.inputs) key += input.args.dump() + '\x1e';
  key += '\x1d';
  key += node.content;
  return key;
}

ExecTranscript Scorer::transcript(const Node& node, TaskKind kind) {
  const auto key = score_key(node);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = transcripts_.find(key); it != transcripts_.end()) return it->second;
  }
  auto result = harness_.execute(node.content, make_cases(node.inputs, options_.case_timeout), kind);
  std::lock_guard lock(mutex_);
  return transcripts_.emplace(key, std::move(result)).first->second;
}

double Scorer::transcript_similarity(std::string_view reference, std::string_view hypothesis,
                                     const SimilarityMetric& metric) {
  // Byte-equal transcripts are identical outputs, including the empty transcript.
  if (reference == hypothesis) return 1.0;
  switch (metric.kind) {
    case SimilarityMetric::Kind::embedding_cosine: {
      if (!embedder_) throw ConfigError("embedding metric requires an embedding backend");
      try {
        return cosine_similarity(embedder_->embed(reference), embedder_->embed(hypothesis));
      } catch (const Error& e) {
        if (diagnostics_) diagnostics_->record("scoring", std::string("embedding failed, scored 0: ") + e.what());
        return 0.0;
      }
    }
    case SimilarityMetric::Kind::bleu:
      if (metric.symmetric_bleu) return 0.5 * (bleu(hypothesis, reference) + bleu(reference, hypothesis));
      return bleu(hypothesis, reference);
    case SimilarityMetric::Kind::levenshtein_ratio: return levenshtein_ratio(reference, hypothesis);
  }
  return 0.0;
}

double Scorer::node_pair_similarity(const Node& reference, const Node& hypothesis, TaskKind kind,
                                    const SimilarityMetric& metric) {
  if (reference.inputs != hypothesis.inputs) {
    throw ConfigError("nodes '" + reference.id + "' and '" + hypothesis.id + "' do not share test inputs");
  }
  const auto ref = transcript(reference, kind).concatenated();
  const auto hyp = transcript(hypothesis, kind).concatenated();
  return transcript_similarity(ref, hyp, metric);
}

double Scorer::path_consistency(const Tree& tree, const Path& path, const SimilarityMetric& metric) {
  if (path.length() < 1) throw ConfigError("path must contain at least one edge");
  return node_pair_similarity(tree.node(path.first()), tree.node(path.last()), tree.task_kind(), metric);
}

void Scorer::warm(const Tree& tree, std::span<const std::string> ids) {
  parallel_for(ids.size(), options_.max_parallel, [&](std::size_t i) { transcript(tree.node(ids[i]), tree.task_kind()); });
}

std::vector<double> Scorer::tree_profile(const Tree& tree, int n_max, PathAnchor anchor, const SimilarityMetric& metric) {
  if (n_max < 1 || n_max > tree.depth_limit()) {
    throw ConfigError("n_max " + std::to_string(n_max) + " outside [1, " + std::to_string(tree.depth_limit()) + "]");
  }
  std::vector<std::vector<Path>> paths_by_length;
  std::set<std::string> endpoint_ids;
  for (int n = 1; n <= n_max; ++n) {
    paths_by_length.push_back(enumerate_paths(tree, n, anchor));
    for (const auto& p : paths_by_length.back()) {
      endpoint_ids.insert(p.first());
      endpoint_ids.insert(p.last());
    }
  }
  const std::vector<std::string> ids(endpoint_ids.begin(), endpoint_ids.end());
  warm(tree, ids);

  std::map<std::pair<std::string, std::string>, double> pair_scores;
  std::vector<double> profile;
  for (const auto& paths : paths_by_length) {
    double sum = 0.0;
    for (const auto& p : paths) {
      const auto key = std::make_pair(p.first(), p.last());
      auto it = pair_scores.find(key);
      if (it == pair_scores.end()) it = pair_scores.emplace(key, path_consistency(tree, p, metric)).first;
      sum += it->second;
    }
    profile.push_back(sum / static_cast<double>(paths.size()));
  }
  return profile;
}

double Scorer::tree_consistency(const Tree& tree, int n, PathAnchor anchor, const SimilarityMetric& metric) {
  const auto paths = enumerate_paths(tree, n, anchor);
  std::set<std::string> endpoint_ids;
  for (const auto& p : paths) {
    endpoint_ids.insert(p.first());
    endpoint_ids.insert(p.last());
  }
  const std::vector<std::string> ids(endpoint_ids.begin(), endpoint_ids.end());
  warm(tree, ids);
  double sum = 0.0;
  for (const auto& p : paths) sum += path_consistency(tree, p, metric);
  return sum / static_cast<double>(paths.size());
}

double Scorer::forest_consistency(const Forest& forest, int n, PathAnchor anchor, const SimilarityMetric& metric) {
  if (forest.trees.empty()) throw ConfigError("forest is empty");
  std::vector<double> per_tree;
  per_tree.reserve(forest.trees.size());
  for (const auto& tree : forest.trees) per_tree.push_back(tree_consistency(tree, n, anchor, metric));
  return mean(per_tree);
}

std::map<std::string, double> Scorer::similarity_to_root(const Tree& tree, const SimilarityMetric& metric) {
  std::vector<std::string> ids;
  for (const auto& n : tree.nodes()) ids.push_back(n.id);
  warm(tree, ids);
  std::map<std::string, double> out;
  for (const auto& n : tree.nodes()) {
    out[n.id] = node_pair_similarity(tree.root(), n, tree.task_kind(), metric);
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean of an empty set");
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

RunStats aggregate_runs(std::span<const double> values) {
  if (values.empty()) throw ConfigError("at least one run is required");
  RunStats stats;
  stats.runs = values.size();
  stats.mean = mean(values);
  if (values.size() > 1) {
    double squares = 0.0;
    for (const double v : values) squares += (v - stats.mean) * (v - stats.mean);
    stats.std = std::sqrt(squares / static_cast<double>(values.size() - 1));
  }
  return stats;
}

std::string format_percent_cell(const RunStats& stats) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.1f±%.1f", stats.mean * 100.0, stats.std * 100.0);
  return buffer;
}

}  // namespace sctree
