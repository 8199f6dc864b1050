#include "sctree/correlation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sctree/errors.hpp"
#include "sctree/text.hpp"

namespace sctree {

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw CorrelationError("series lengths differ");
  if (xs.size() < 3) throw CorrelationError("correlation needs at least 3 points");
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw CorrelationError("correlation undefined for a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw CorrelationError("series lengths differ");
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  return pearson(rx, ry);
}

bool is_inverse_metric(std::string_view column) { return column == "autorank" || column == "metricx"; }

// ---------------------------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(text::trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw ParseError("row " + std::to_string(row), "unterminated quoted field");
  cells.emplace_back(text::trim(cell));
  return cells;
}

double parse_number(const std::string& cell, const std::string& field) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto r = std::from_chars(begin, end, value);
  if (cell.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(value)) {
    throw ParseError(field, "expected a number, got '" + cell + "'");
  }
  return value;
}

std::string format_correlation(const std::optional<double>& value) {
  if (!value) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%+.4f", *value);
  return buffer;
}

}  // namespace

const std::vector<double>& MetricTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < column_names.size(); ++c) {
    if (column_names[c] == name) return columns[c];
  }
  throw ConfigError("metric table has no column '" + std::string(name) + "'");
}

bool MetricTable::has_column(std::string_view name) const {
  return std::find(column_names.begin(), column_names.end(), name) != column_names.end();
}

void MetricTable::set_row(const std::string& model, const std::vector<std::pair<std::string, double>>& values) {
  auto row_it = std::find(models.begin(), models.end(), model);
  const bool append = row_it == models.end();
  const std::size_t row = append ? models.size() : static_cast<std::size_t>(row_it - models.begin());
  if (append) {
    for (const auto& name : column_names) {
      const bool given = std::any_of(values.begin(), values.end(), [&](const auto& v) { return v.first == name; });
      if (!given) throw ConfigError("new row '" + model + "' is missing column '" + name + "'");
    }
    models.push_back(model);
    for (auto& column : columns) column.push_back(0.0);
  }
  for (const auto& [name, value] : values) {
    const auto c = std::find(column_names.begin(), column_names.end(), name);
    if (c == column_names.end()) throw ConfigError("metric table has no column '" + name + "'");
    columns[static_cast<std::size_t>(c - column_names.begin())][row] = value;
  }
}

MetricTable MetricTable::parse_csv(std::string_view text_in) {
  MetricTable table;
  std::istringstream stream{std::string(text_in)};
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(stream, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto cells = split_csv_line(line, row);
    if (!header_seen) {
      if (cells.empty() || cells.front() != "model") throw ParseError("header", "first column must be 'model'");
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].empty()) throw ParseError("header", "empty column name");
        if (std::count(cells.begin(), cells.end(), cells[c]) > 1) throw ParseError("header", "duplicate column '" + cells[c] + "'");
        table.column_names.push_back(cells[c]);
      }
      table.columns.resize(table.column_names.size());
      header_seen = true;
      continue;
    }
    if (cells.size() != table.column_names.size() + 1) {
      throw ParseError("row " + std::to_string(row), "expected " + std::to_string(table.column_names.size() + 1) +
                                                          " cells, found " + std::to_string(cells.size()));
    }
    if (cells.front().empty()) throw ParseError("row " + std::to_string(row) + ".model", "empty model name");
    table.models.push_back(cells.front());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      table.columns[c - 1].push_back(parse_number(cells[c], "row " + std::to_string(row) + "." + table.column_names[c - 1]));
    }
  }
  if (!header_seen) throw ParseError("header", "empty CSV");
  return table;
}

MetricTable MetricTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open fixture '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

const CorrelationEntry& CorrelationReport::find(std::string_view internal, std::string_view external) const {
  for (const auto& e : entries) {
    if (e.internal == internal && e.external == external) return e;
  }
  throw ConfigError("no correlation entry for " + std::string(internal) + " vs " + std::string(external));
}

nlohmann::json CorrelationReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"internal", e.internal},
                    {"external", e.external},
                    {"pearson", e.pearson ? nlohmann::json(*e.pearson) : nlohmann::json(nullptr)},
                    {"spearman", e.spearman ? nlohmann::json(*e.spearman) : nlohmann::json(nullptr)},
                    {"sign_adjusted", e.sign_adjusted},
                    {"note", e.note}});
  }
  return {{"models", models}, {"entries", std::move(rows)}};
}

std::string CorrelationReport::render_table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-10s %9s %9s  %s\n", "internal", "external", "pearson", "spearman", "sign");
  out += line;
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, "%-10s %-10s %9s %9s  %s%s\n", e.internal.c_str(), e.external.c_str(),
                  format_correlation(e.pearson).c_str(), format_correlation(e.spearman).c_str(),
                  e.sign_adjusted ? "negated" : "as-is", e.note.empty() ? "" : ("  (" + e.note + ")").c_str());
    out += line;
  }
  return out;
}

CorrelationReport correlate(const MetricTable& table) {
  CorrelationReport report;
  report.models = table.models;
  for (const auto internal : kInternalColumns) {
    if (!table.has_column(internal)) continue;
    const auto& xs = table.column(internal);
    for (const auto external : kExternalColumns) {
      if (!table.has_column(external)) continue;
      CorrelationEntry entry;
      entry.internal = internal;
      entry.external = external;
      entry.sign_adjusted = is_inverse_metric(external);
      std::vector<double> ys = table.column(external);
      if (entry.sign_adjusted) {
        for (double& y : ys) y = -y;
      }
      try {
        entry.pearson = pearson(xs, ys);
        entry.spearman = spearman(xs, ys);
      } catch (const CorrelationError& e) {
        entry.note = e.what();
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

CorrelationMatrix correlation_matrix(const MetricTable& table) {
  CorrelationMatrix m;
  m.names = table.column_names;
  const std::size_t n = m.names.size();
  m.pearson.assign(n, std::vector<std::optional<double>>(n));
  std::vector<bool> constant(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& col = table.columns[c];
    constant[c] = std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); });
    if (constant[c]) m.constant_columns.push_back(m.names[c]);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      if (constant[a] || constant[b]) continue;
      try {
        const double r = pearson(table.columns[a], table.columns[b]);
        m.pearson[a][b] = r;
        m.pearson[b][a] = r;
      } catch (const CorrelationError&) {
      }
    }
  }
  return m;
}

nlohmann::json CorrelationMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : pearson) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : row) cells.push_back(cell ? nlohmann::json(*cell) : nlohmann::json(nullptr));
    rows.push_back(std::move(cells));
  }
  return {{"columns", names}, {"pearson", std::move(rows)}, {"constant_columns", constant_columns}};
}

std::string CorrelationMatrix::render_table() const {
  std::string out;
  char cell[48];
  std::snprintf(cell, sizeof cell, "%-10s", "");
  out += cell;
  for (const auto& name : names) {
    std::snprintf(cell, sizeof cell, " %9s", name.c_str());
    out += cell;
  }
  out += '\n';
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::snprintf(cell, sizeof cell, "%-10s", names[a].c_str());
    out += cell;
    for (std::size_t b = 0; b < names.size(); ++b) {
      std::snprintf(cell, sizeof cell, " %9s", format_correlation(pearson[a][b]).c_str());
      out += cell;
    }
    out += '\n';
  }
  for (const auto& name : constant_columns) out += "constant column: " + name + "\n";
  return out;
}

}  // namespace sctree
