#include "manifest.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "sctree/errors.hpp"

namespace sctree::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TreeStatus status) {
  switch (status) {
    case TreeStatus::pending: return "pending";
    case TreeStatus::done: return "done";
    case TreeStatus::failed: return "failed";
  }
  return "pending";
}

namespace {

TreeStatus parse_status(const std::string& text) {
  if (text == "pending") return TreeStatus::pending;
  if (text == "done") return TreeStatus::done;
  if (text == "failed") return TreeStatus::failed;
  throw ParseError("manifest.trees.status", "unknown status '" + text + "'");
}

}  // namespace

Manifest Manifest::fresh(json config, std::size_t runs, std::size_t roots) {
  Manifest m;
  m.config = std::move(config);
  for (std::size_t r = 0; r < runs; ++r) {
    for (std::size_t t = 0; t < roots; ++t) m.trees.push_back({r, t, TreeStatus::pending, tree_file(r, t), 0, "", ""});
  }
  m.forests.assign(runs, "");
  return m;
}

TreeRecord& Manifest::record(std::size_t run, std::size_t tree) {
  return trees.at(run * roots() + tree);
}

const TreeRecord& Manifest::record(std::size_t run, std::size_t tree) const {
  return trees.at(run * roots() + tree);
}

json Manifest::to_json() const {
  json tree_docs = json::array();
  for (const auto& t : trees) {
    json doc = {{"run", t.run}, {"tree", t.tree}, {"status", to_string(t.status)}, {"file", t.file},
                {"sentinel_nodes", t.sentinel_nodes}};
    if (t.status == TreeStatus::failed) {
      doc["error_kind"] = t.error_kind;
      doc["error"] = t.error;
    }
    tree_docs.push_back(std::move(doc));
  }
  json forest_docs = json::array();
  for (std::size_t r = 0; r < forests.size(); ++r) {
    forest_docs.push_back({{"run", r}, {"file", forests[r].empty() ? json(nullptr) : json(forests[r])}});
  }
  return {{"version", kVersion}, {"config", config}, {"trees", std::move(tree_docs)}, {"forests", std::move(forest_docs)}};
}

Manifest Manifest::from_json(const json& document) {
  Manifest m;
  try {
    if (document.at("version").get<int>() != kVersion) throw ParseError("manifest.version", "unsupported version");
    m.config = document.at("config");
    for (const auto& f : document.at("forests")) {
      const auto& file = f.at("file");
      m.forests.push_back(file.is_null() ? "" : file.get<std::string>());
    }
    for (const auto& t : document.at("trees")) {
      TreeRecord rec;
      rec.run = t.at("run").get<std::size_t>();
      rec.tree = t.at("tree").get<std::size_t>();
      rec.status = parse_status(t.at("status").get<std::string>());
      rec.file = t.at("file").get<std::string>();
      rec.sentinel_nodes = t.at("sentinel_nodes").get<std::size_t>();
      rec.error_kind = t.value("error_kind", "");
      rec.error = t.value("error", "");
      m.trees.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw ParseError("manifest", e.what());
  }
  if (m.forests.empty() || m.trees.size() % m.forests.size() != 0) {
    throw ParseError("manifest.trees", "tree count does not match the run count");
  }
  for (std::size_t i = 0; i < m.trees.size(); ++i) {
    if (m.trees[i].run * m.roots() + m.trees[i].tree != i) throw ParseError("manifest.trees", "records out of order");
  }
  return m;
}

Manifest Manifest::load(const fs::path& run_dir) { return from_json(read_json(run_dir / kFileName)); }

void Manifest::save(const fs::path& run_dir) const { write_text_atomic(run_dir / kFileName, dump_document(to_json())); }

std::string tree_file(std::size_t run, std::size_t tree) {
  return "runs/r" + std::to_string(run) + "/tree-" + std::to_string(tree) + ".json";
}

std::string forest_file(std::size_t run) { return "forest-r" + std::to_string(run) + ".json"; }

std::string dump_document(const json& document) {
  return document.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw ConfigError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace sctree::cli
