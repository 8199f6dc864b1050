#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sctree {

// Sample Pearson correlation, two-pass. Throws CorrelationError for length mismatch, fewer than
// 3 points, or a constant series.
double pearson(std::span<const double> xs, std::span<const double> ys);

// 1-based ranks; tied values receive the average of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation of fractional ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Per-model metric table. Columns keep file order.
struct MetricTable {
  std::vector<std::string> models;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;  // columns[c][model]

  const std::vector<double>& column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  // Sets (or appends) the row for `model`; missing columns are an error.
  void set_row(const std::string& model, const std::vector<std::pair<std::string, double>>& values);

  // CSV with a header row; first column is "model". Throws ParseError.
  static MetricTable parse_csv(std::string_view text);
  static MetricTable load_csv(const std::filesystem::path& path);
};

inline constexpr std::string_view kInternalColumns[] = {"c1_emb",  "c2_emb",  "c3_emb",
                                                        "c1_bleu", "c2_bleu", "c3_bleu"};
inline constexpr std::string_view kExternalColumns[] = {"autorank", "metricx", "cometkiwi"};

// Lower-is-better external metrics; negated before correlating.
bool is_inverse_metric(std::string_view column);

struct CorrelationEntry {
  std::string internal;
  std::string external;
  std::optional<double> pearson;
  std::optional<double> spearman;
  bool sign_adjusted = false;
  std::string note;  // set when a correlation is undefined
};

struct CorrelationReport {
  std::vector<std::string> models;
  std::vector<CorrelationEntry> entries;

  const CorrelationEntry& find(std::string_view internal, std::string_view external) const;
  nlohmann::json to_json() const;
  std::string render_table() const;
};

// Every (internal, external) column pair present in the table. Undefined correlations are
// recorded with a note instead of throwing.
CorrelationReport correlate(const MetricTable& table);

// Pearson between every pair of columns, raw values (no sign adjustment). Cells that are
// undefined (constant column) stay empty and the column is listed in constant_columns.
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> pearson;
  std::vector<std::string> constant_columns;

  nlohmann::json to_json() const;
  std::string render_table() const;
};

CorrelationMatrix correlation_matrix(const MetricTable& table);

}  // namespace sctree
