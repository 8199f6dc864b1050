#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sctree::cli {

enum class TreeStatus { pending, done, failed };

std::string_view to_string(TreeStatus status);

struct TreeRecord {
  std::size_t run = 0;
  std::size_t tree = 0;
  TreeStatus status = TreeStatus::pending;
  std::string file;  // relative to the run directory
  std::size_t sentinel_nodes = 0;
  // "gateway" when the evaluatee or harness could not be used at all, "other" otherwise.
  std::string error_kind;
  std::string error;
};

// State of one artifact directory. Rewritten after every tree so an interrupted run resumes
// from the last finished tree.
struct Manifest {
  static constexpr int kVersion = 1;
  static constexpr std::string_view kFileName = "manifest.json";

  nlohmann::json config;
  std::vector<TreeRecord> trees;  // run-major
  std::vector<std::string> forests;  // per run; empty until the forest file is written

  static Manifest fresh(nlohmann::json config, std::size_t runs, std::size_t roots);

  TreeRecord& record(std::size_t run, std::size_t tree);
  const TreeRecord& record(std::size_t run, std::size_t tree) const;
  std::size_t runs() const { return forests.size(); }
  std::size_t roots() const { return runs() == 0 ? 0 : trees.size() / runs(); }

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& document);

  static Manifest load(const std::filesystem::path& run_dir);
  void save(const std::filesystem::path& run_dir) const;
};

std::string tree_file(std::size_t run, std::size_t tree);
std::string forest_file(std::size_t run);

// Same bytes every time: two-space indent, trailing newline.
std::string dump_document(const nlohmann::json& document);

std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);
// Writes a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace sctree::cli
