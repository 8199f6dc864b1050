#include "sctree/tree.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "sctree/errors.hpp"
#include "sctree/parallel.hpp"
#include "sctree/transform.hpp"

namespace sctree {

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::translation ? "translation" : "programming";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "translation") return TaskKind::translation;
  if (text == "programming") return TaskKind::programming;
  throw ConfigError("unknown task kind '" + std::string(text) + "' (expected translation|programming)");
}

std::string_view to_string(PathAnchor anchor) {
  return anchor == PathAnchor::root_only ? "root" : "all";
}

PathAnchor parse_path_anchor(std::string_view text) {
  if (text == "root" || text == "root_only") return PathAnchor::root_only;
  if (text == "all" || text == "all_chains") return PathAnchor::all_chains;
  throw ConfigError("unknown path anchor '" + std::string(text) + "' (expected root|all)");
}

std::string child_id(std::string_view parent_id, std::size_t pair_index) {
  if (parent_id == kRootId) return std::to_string(pair_index);
  std::string id(parent_id);
  id += '-';
  id += std::to_string(pair_index);
  return id;
}

std::size_t complete_tree_size(std::size_t branching, int depth_limit) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (int d = 0; d <= depth_limit; ++d) {
    total += level;
    level *= branching;
  }
  return total;
}

namespace {

[[noreturn]] void structure_error(const std::string& what) { throw ConfigError("tree: " + what); }

void validate_pairs(const std::vector<OperationPair>& pairs) {
  if (pairs.empty()) throw ConfigError("at least one operation pair is required");
  std::unordered_set<std::string> labels;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (pair.forward_prompt.empty() || pair.inverse_prompt.empty()) {
      throw ConfigError("operation pair " + std::to_string(i) + " has an empty prompt");
    }
    if (!labels.insert(pair.label).second) {
      throw ConfigError("duplicate operation pair label '" + pair.label + "'");
    }
  }
}

}  // namespace

Tree::Tree(TaskKind task_kind, std::vector<OperationPair> pairs, int depth_limit,
           std::vector<Node> nodes, std::vector<Edge> edges)
    : task_kind_(task_kind),
      pairs_(std::move(pairs)),
      depth_limit_(depth_limit),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  if (depth_limit_ < 1) structure_error("depth limit must be >= 1");
  validate_pairs(pairs_);
  const std::size_t k = pairs_.size();
  const std::size_t expected = complete_tree_size(k, depth_limit_);
  if (nodes_.size() != expected) {
    structure_error("expected " + std::to_string(expected) + " nodes, found " +
                    std::to_string(nodes_.size()));
  }
  if (edges_.size() != nodes_.size() - 1) {
    structure_error("expected " + std::to_string(nodes_.size() - 1) + " edges, found " +
                    std::to_string(edges_.size()));
  }
  if (nodes_.front().id != kRootId) structure_error("missing root node (first node must have id \"root\")");
  if (nodes_.front().depth != 0) structure_error("root depth must be 0");

  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) structure_error("duplicate node id '" + nodes_[i].id + "'");
  }
  const auto& root_inputs = nodes_.front().inputs;
  for (const auto& n : nodes_) {
    if (n.depth < 0 || n.depth > depth_limit_) structure_error("node '" + n.id + "' has depth out of range");
    if (n.inputs != root_inputs) structure_error("node '" + n.id + "' does not share the root's inputs");
  }

  std::vector<int> in_degree(nodes_.size(), 0);
  std::vector<std::size_t> out_degree(nodes_.size(), 0);
  for (const auto& e : edges_) {
    const auto parent = index_.find(e.parent_id);
    const auto child = index_.find(e.child_id);
    if (parent == index_.end()) structure_error("edge references unknown parent '" + e.parent_id + "'");
    if (child == index_.end()) structure_error("edge references unknown child '" + e.child_id + "'");
    if (e.pair_index >= k) structure_error("edge into '" + e.child_id + "' has pair index out of range");
    if (e.child_id != child_id(e.parent_id, e.pair_index)) {
      structure_error("edge child id '" + e.child_id + "' does not match parent '" + e.parent_id +
                      "' and pair " + std::to_string(e.pair_index));
    }
    if (nodes_[child->second].depth != nodes_[parent->second].depth + 1) {
      structure_error("edge into '" + e.child_id + "' does not increase depth by one");
    }
    ++in_degree[child->second];
    ++out_degree[parent->second];
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const int want_in = i == 0 ? 0 : 1;
    if (in_degree[i] != want_in) structure_error("node '" + nodes_[i].id + "' has wrong number of parents");
    const std::size_t want_out = nodes_[i].depth < depth_limit_ ? k : 0;
    if (out_degree[i] != want_out) structure_error("node '" + nodes_[i].id + "' has wrong number of children");
  }
}

bool Tree::contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

const Node& Tree::node(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw std::out_of_range("no node with id '" + std::string(id) + "'");
  return nodes_[it->second];
}

void Forest::validate() const {
  if (trees.empty()) return;
  std::set<std::string> roots;
  const auto& first = trees.front();
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto& t = trees[i];
    if (t.task_kind() != task_kind) throw ConfigError("forest: tree " + std::to_string(i) + " has a different task kind");
    if (t.depth_limit() != first.depth_limit() || t.branching() != first.branching()) {
      throw ConfigError("forest: tree " + std::to_string(i) + " has a different shape");
    }
    if (!roots.insert(t.root().content).second) {
      throw ConfigError("forest: tree " + std::to_string(i) + " repeats an earlier root");
    }
  }
}

Tree build_tree(const Node& root, std::span<const OperationPair> pairs, int depth_limit,
                const Transformer& transformer, const BuildOptions& options) {
  if (depth_limit < 1) throw ConfigError("depth limit must be >= 1, got " + std::to_string(depth_limit));
  if (pairs.empty()) throw ConfigError("at least one operation pair is required");
  const std::size_t k = pairs.size();

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  nodes.reserve(complete_tree_size(k, depth_limit));
  nodes.push_back({std::string(kRootId), root.content, root.inputs, 0});

  std::size_t frontier_begin = 0;
  for (int d = 1; d <= depth_limit; ++d) {
    const std::size_t frontier_end = nodes.size();
    const std::size_t frontier_size = frontier_end - frontier_begin;
    std::vector<std::string> contents(frontier_size * k);
    parallel_for(contents.size(), options.max_parallel, [&](std::size_t i) {
      const Node& parent = nodes[frontier_begin + i / k];
      contents[i] = transformer.apply_pair(parent.content, pairs[i % k]);
    });
    for (std::size_t i = 0; i < contents.size(); ++i) {
      const std::string parent_id = nodes[frontier_begin + i / k].id;
      Node child{child_id(parent_id, i % k), std::move(contents[i]), root.inputs, d};
      edges.push_back({parent_id, child.id, i % k});
      nodes.push_back(std::move(child));
    }
    frontier_begin = frontier_end;
  }
  return Tree(options.task_kind, std::vector<OperationPair>(pairs.begin(), pairs.end()), depth_limit,
              std::move(nodes), std::move(edges));
}

namespace {

void extend_paths(const Tree& tree, std::vector<std::string>& prefix, int remaining,
                  std::vector<Path>& out) {
  if (remaining == 0) {
    out.push_back({prefix});
    return;
  }
  for (std::size_t i = 0; i < tree.branching(); ++i) {
    prefix.push_back(child_id(prefix.back(), i));
    extend_paths(tree, prefix, remaining - 1, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Path> enumerate_paths(const Tree& tree, int n, PathAnchor anchor) {
  if (n < 1 || n > tree.depth_limit()) {
    throw ConfigError("path length " + std::to_string(n) + " outside [1, " +
                      std::to_string(tree.depth_limit()) + "]");
  }
  std::vector<Path> paths;
  std::vector<std::string> prefix;
  for (const auto& start : tree.nodes()) {
    if (anchor == PathAnchor::root_only && start.depth != 0) break;
    if (start.depth > tree.depth_limit() - n) continue;
    prefix.assign(1, start.id);
    extend_paths(tree, prefix, n, paths);
  }
  return paths;
}

// ---------------------------------------------------------------------------------------------
// JSON persistence

namespace {

using nlohmann::json;

void expect_fields(const json& object, const std::string& path,
                   std::initializer_list<std::string_view> fields) {
  if (!object.is_object()) throw ParseError(path.empty() ? "document" : path, "expected an object");
  for (const auto& field : fields) {
    if (!object.contains(std::string(field))) {
      throw ParseError(path.empty() ? std::string(field) : path + "." + std::string(field), "missing field");
    }
  }
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const auto& field : fields) known = known || key == field;
    if (!known) throw ParseError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

const std::string& get_string(const json& object, const std::string& path, const char* field) {
  const auto& v = object.at(field);
  if (!v.is_string()) throw ParseError(path.empty() ? field : path + "." + field, "expected a string");
  return v.get_ref<const std::string&>();
}

std::int64_t get_integer(const json& object, const std::string& path, const char* field) {
  const auto& v = object.at(field);
  if (!v.is_number_integer()) throw ParseError(path.empty() ? field : path + "." + field, "expected an integer");
  return v.get<std::int64_t>();
}

const json& get_array(const json& object, const std::string& path, const char* field) {
  const auto& v = object.at(field);
  if (!v.is_array()) throw ParseError(path.empty() ? field : path + "." + field, "expected an array");
  return v;
}

std::string indexed(const std::string& path, const char* field, std::size_t i) {
  return (path.empty() ? std::string(field) : path + "." + field) + "[" + std::to_string(i) + "]";
}

json inputs_to_json(const TestInputs& inputs) {
  json out = json::array();
  for (const auto& input : inputs) out.push_back(input.args);
  return out;
}

TestInputs inputs_from_json(const json& array, const std::string& path) {
  TestInputs inputs;
  for (std::size_t i = 0; i < array.size(); ++i) {
    if (!array[i].is_array()) throw ParseError(path + "[" + std::to_string(i) + "]", "expected an argument list");
    inputs.push_back({array[i]});
  }
  return inputs;
}

Tree tree_from_json(const json& doc, const std::string& path) {
  expect_fields(doc, path, {"task_kind", "branching", "depth_limit", "pairs", "nodes", "edges"});
  const auto field = [&](const char* name) { return path.empty() ? std::string(name) : path + "." + name; };

  TaskKind kind;
  try {
    kind = parse_task_kind(get_string(doc, path, "task_kind"));
  } catch (const ConfigError& e) {
    throw ParseError(field("task_kind"), e.what());
  }
  const auto branching = get_integer(doc, path, "branching");
  const auto depth_limit = get_integer(doc, path, "depth_limit");
  if (depth_limit < 1 || depth_limit > 64) throw ParseError(field("depth_limit"), "must be in [1, 64]");

  std::vector<OperationPair> pairs;
  const auto& pairs_json = get_array(doc, path, "pairs");
  for (std::size_t i = 0; i < pairs_json.size(); ++i) {
    const auto p = indexed(path, "pairs", i);
    expect_fields(pairs_json[i], p, {"label", "forward_prompt", "inverse_prompt"});
    pairs.push_back({get_string(pairs_json[i], p, "forward_prompt"),
                     get_string(pairs_json[i], p, "inverse_prompt"), get_string(pairs_json[i], p, "label")});
  }
  if (branching < 1 || static_cast<std::size_t>(branching) != pairs.size()) {
    throw ParseError(field("branching"), "must equal the number of pairs");
  }

  std::vector<Node> nodes;
  const auto& nodes_json = get_array(doc, path, "nodes");
  for (std::size_t i = 0; i < nodes_json.size(); ++i) {
    const auto p = indexed(path, "nodes", i);
    expect_fields(nodes_json[i], p, {"id", "depth", "content", "inputs"});
    nodes.push_back({get_string(nodes_json[i], p, "id"), get_string(nodes_json[i], p, "content"),
                     inputs_from_json(get_array(nodes_json[i], p, "inputs"), p + ".inputs"),
                     static_cast<int>(get_integer(nodes_json[i], p, "depth"))});
  }
  bool has_root = false;
  for (const auto& n : nodes) has_root = has_root || n.id == kRootId;
  if (!has_root) throw ParseError(field("nodes"), "missing root node (id \"root\")");

  std::vector<Edge> edges;
  const auto& edges_json = get_array(doc, path, "edges");
  for (std::size_t i = 0; i < edges_json.size(); ++i) {
    const auto p = indexed(path, "edges", i);
    expect_fields(edges_json[i], p, {"parent", "child", "pair_index"});
    const auto pair_index = get_integer(edges_json[i], p, "pair_index");
    if (pair_index < 0) throw ParseError(p + ".pair_index", "must be non-negative");
    edges.push_back({get_string(edges_json[i], p, "parent"), get_string(edges_json[i], p, "child"),
                     static_cast<std::size_t>(pair_index)});
  }

  try {
    return Tree(kind, std::move(pairs), static_cast<int>(depth_limit), std::move(nodes), std::move(edges));
  } catch (const ConfigError& e) {
    throw ParseError(field("nodes"), e.what());
  }
}

}  // namespace

nlohmann::json serialize_tree(const Tree& tree) {
  json pairs = json::array();
  for (const auto& p : tree.pairs()) {
    pairs.push_back({{"label", p.label}, {"forward_prompt", p.forward_prompt}, {"inverse_prompt", p.inverse_prompt}});
  }
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back({{"id", n.id}, {"depth", n.depth}, {"content", n.content}, {"inputs", inputs_to_json(n.inputs)}});
  }
  json edges = json::array();
  for (const auto& e : tree.edges()) {
    edges.push_back({{"parent", e.parent_id}, {"child", e.child_id}, {"pair_index", e.pair_index}});
  }
  return {{"task_kind", to_string(tree.task_kind())},
          {"branching", tree.branching()},
          {"depth_limit", tree.depth_limit()},
          {"pairs", std::move(pairs)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

Tree deserialize_tree(const nlohmann::json& document) { return tree_from_json(document, ""); }

nlohmann::json serialize_forest(const Forest& forest) {
  json trees = json::array();
  for (const auto& t : forest.trees) trees.push_back(serialize_tree(t));
  return {{"task_kind", to_string(forest.task_kind)}, {"trees", std::move(trees)}};
}

Forest deserialize_forest(const nlohmann::json& document) {
  expect_fields(document, "", {"task_kind", "trees"});
  Forest forest;
  try {
    forest.task_kind = parse_task_kind(get_string(document, "", "task_kind"));
  } catch (const ConfigError& e) {
    throw ParseError("task_kind", e.what());
  }
  const auto& trees = get_array(document, "", "trees");
  for (std::size_t i = 0; i < trees.size(); ++i) {
    forest.trees.push_back(tree_from_json(trees[i], indexed("", "trees", i)));
  }
  try {
    forest.validate();
  } catch (const ConfigError& e) {
    throw ParseError("trees", e.what());
  }
  return forest;
}

// ---------------------------------------------------------------------------------------------
// Dumps

namespace {

std::string similarity_text(const std::map<std::string, double>& sims, const std::string& id) {
  const auto it = sims.find(id);
  if (it == sims.end()) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", it->second);
  return buffer;
}

}  // namespace

std::string render_tree_dump(const Tree& tree, const std::map<std::string, double>& similarity_to_root) {
  std::string out;
  for (const auto& n : tree.nodes()) {
    out += n.id == kRootId ? std::string("Root") : "Node " + n.id;
    out += " (Level " + std::to_string(n.depth) + ", similarity to root " +
           similarity_text(similarity_to_root, n.id) + ")\n";
    out += n.content;
    out += "\n\n";
  }
  return out;
}

nlohmann::json tree_dump_json(const Tree& tree, const std::map<std::string, double>& similarity_to_root) {
  json records = json::array();
  for (const auto& n : tree.nodes()) {
    const auto it = similarity_to_root.find(n.id);
    records.push_back({{"id", n.id},
                       {"level", n.depth},
                       {"content", n.content},
                       {"similarity_to_root", it == similarity_to_root.end() ? json(nullptr) : json(it->second)}});
  }
  return records;
}

}  // namespace sctree
