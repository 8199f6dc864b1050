#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sctree/scoring.hpp"
#include "sctree/tree.hpp"
#include "sctree/types.hpp"

namespace sctree {

struct MetricScores {
  std::string metric;
  // per_tree[run][tree][n - 1], fractions in [0, 1].
  std::vector<std::vector<std::vector<double>>> per_tree;
  // forest[run][n - 1]: mean over trees of per_tree.
  std::vector<std::vector<double>> forest;
  // stats[n - 1]: mean and sample std over runs of forest[.][n - 1].
  std::vector<RunStats> stats;
};

struct ScoreReport {
  TaskKind task_kind = TaskKind::translation;
  PathAnchor anchor = PathAnchor::root_only;
  int n_max = 3;
  std::vector<MetricScores> metrics;

  const MetricScores& metric(std::string_view name) const;

  nlohmann::json to_json() const;
  static ScoreReport from_json(const nlohmann::json& document);

  // Aligned table: one row per metric, one "C_n(F)" column per n, cells like "98.0±0.0".
  std::string render_table() const;
};

// Fills forest and stats from per_tree.
void finalize_metric_scores(MetricScores& scores, int n_max);

}  // namespace sctree
