#include "sctree/report.hpp"

#include <algorithm>

#include "sctree/errors.hpp"

namespace sctree {

using nlohmann::json;

void finalize_metric_scores(MetricScores& scores, int n_max) {
  const auto n_count = static_cast<std::size_t>(n_max);
  scores.forest.clear();
  for (const auto& run : scores.per_tree) {
    if (run.empty()) throw ConfigError("run without trees in metric '" + scores.metric + "'");
    std::vector<double> forest(n_count, 0.0);
    for (std::size_t n = 0; n < n_count; ++n) {
      std::vector<double> column;
      for (const auto& tree : run) {
        if (tree.size() != n_count) throw ConfigError("tree score row has the wrong number of path lengths");
        column.push_back(tree[n]);
      }
      forest[n] = mean(column);
    }
    scores.forest.push_back(std::move(forest));
  }
  scores.stats.clear();
  for (std::size_t n = 0; n < n_count; ++n) {
    std::vector<double> runs;
    for (const auto& forest : scores.forest) runs.push_back(forest[n]);
    scores.stats.push_back(aggregate_runs(runs));
  }
}

const MetricScores& ScoreReport::metric(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.metric == name) return m;
  }
  throw ConfigError("score report has no metric '" + std::string(name) + "'");
}

json ScoreReport::to_json() const {
  json metric_docs = json::array();
  for (const auto& m : metrics) {
    json stats = json::array();
    for (std::size_t n = 0; n < m.stats.size(); ++n) {
      stats.push_back({{"n", n + 1},
                       {"mean", m.stats[n].mean},
                       {"std", m.stats[n].std},
                       {"runs", m.stats[n].runs},
                       {"cell", format_percent_cell(m.stats[n])}});
    }
    metric_docs.push_back({{"metric", m.metric}, {"per_tree", m.per_tree}, {"forest", m.forest}, {"stats", stats}});
  }
  return {{"task_kind", to_string(task_kind)},
          {"anchor", to_string(anchor)},
          {"n_max", n_max},
          {"metrics", std::move(metric_docs)}};
}

ScoreReport ScoreReport::from_json(const json& document) {
  ScoreReport report;
  try {
    report.task_kind = parse_task_kind(document.at("task_kind").get<std::string>());
    report.anchor = parse_path_anchor(document.at("anchor").get<std::string>());
    report.n_max = document.at("n_max").get<int>();
    for (const auto& m : document.at("metrics")) {
      MetricScores scores;
      scores.metric = m.at("metric").get<std::string>();
      scores.per_tree = m.at("per_tree").get<std::vector<std::vector<std::vector<double>>>>();
      finalize_metric_scores(scores, report.n_max);
      report.metrics.push_back(std::move(scores));
    }
  } catch (const json::exception& e) {
    throw ParseError("score report", e.what());
  } catch (const ConfigError& e) {
    throw ParseError("score report", e.what());
  }
  return report;
}

namespace {

// Display width in terminal columns; "±" is two UTF-8 bytes but one column.
std::size_t display_width(const std::string& s) {
  std::size_t width = 0;
  for (const unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++width;
  }
  return width;
}

std::string pad(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

}  // namespace

std::string ScoreReport::render_table() const {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Metric"};
  for (int n = 1; n <= n_max; ++n) header.push_back("C_" + std::to_string(n) + "(F)");
  rows.push_back(header);
  for (const auto& m : metrics) {
    std::vector<std::string> row{m.metric};
    for (const auto& s : m.stats) row.push_back(format_percent_cell(s));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += pad(row[c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace sctree
