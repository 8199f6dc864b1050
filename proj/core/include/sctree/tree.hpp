#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "sctree/types.hpp"

namespace sctree {

class Transformer;

inline constexpr std::string_view kRootId = "root";

// Id of the child reached from `parent_id` through pair `pair_index`: "root" -> "2" -> "2-0".
std::string child_id(std::string_view parent_id, std::size_t pair_index);

struct Node {
  std::string id;
  std::string content;
  TestInputs inputs;
  int depth = 0;

  friend bool operator==(const Node&, const Node&) = default;
};

struct OperationPair {
  std::string forward_prompt;
  std::string inverse_prompt;
  std::string label;

  friend bool operator==(const OperationPair&, const OperationPair&) = default;
};

struct Edge {
  std::string parent_id;
  std::string child_id;
  std::size_t pair_index = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// A path of length n has n edges and n + 1 node ids, first to last.
struct Path {
  std::vector<std::string> node_ids;

  std::size_t length() const { return node_ids.empty() ? 0 : node_ids.size() - 1; }
  const std::string& first() const { return node_ids.front(); }
  const std::string& last() const { return node_ids.back(); }

  friend bool operator==(const Path&, const Path&) = default;
};

enum class PathAnchor { root_only, all_chains };

std::string_view to_string(PathAnchor anchor);
PathAnchor parse_path_anchor(std::string_view text);

// Total node count of a complete k-ary tree of depth D.
std::size_t complete_tree_size(std::size_t branching, int depth_limit);

// Immutable complete k-ary self-consistency tree. Nodes are stored in breadth-first order with
// siblings ordered by pair index. The constructor validates every structural invariant and throws
// ConfigError naming the first violation.
class Tree {
 public:
  Tree(TaskKind task_kind, std::vector<OperationPair> pairs, int depth_limit,
       std::vector<Node> nodes, std::vector<Edge> edges);

  TaskKind task_kind() const noexcept { return task_kind_; }
  int depth_limit() const noexcept { return depth_limit_; }
  std::size_t branching() const noexcept { return pairs_.size(); }
  const std::vector<OperationPair>& pairs() const noexcept { return pairs_; }

  const Node& root() const { return nodes_.front(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool contains(std::string_view id) const;
  // Throws std::out_of_range for unknown ids.
  const Node& node(std::string_view id) const;

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.task_kind_ == b.task_kind_ && a.depth_limit_ == b.depth_limit_ &&
           a.pairs_ == b.pairs_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  TaskKind task_kind_;
  std::vector<OperationPair> pairs_;
  int depth_limit_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Forest {
  TaskKind task_kind = TaskKind::translation;
  std::vector<Tree> trees;

  // Throws ConfigError if trees disagree on shape or task, or two roots share content.
  void validate() const;
};

struct BuildOptions {
  TaskKind task_kind = TaskKind::translation;
  // Frontier nodes of one depth level expanded concurrently.
  std::size_t max_parallel = 1;
};

// Expands `root` level by level: every node at depth d < D gets one child per pair, whose content
// is transformer.apply_pair(parent.content, pair) and whose inputs are the root's inputs.
// The root's id and depth are normalised to "root" and 0.
Tree build_tree(const Node& root, std::span<const OperationPair> pairs, int depth_limit,
                const Transformer& transformer, const BuildOptions& options = {});

// root_only: every path from the root with exactly n edges (k^n paths).
// all_chains: every descendant chain with exactly n edges starting at any depth <= D - n.
std::vector<Path> enumerate_paths(const Tree& tree, int n, PathAnchor anchor);

nlohmann::json serialize_tree(const Tree& tree);
// Throws ParseError naming the offending field on any schema or structural violation.
Tree deserialize_tree(const nlohmann::json& document);

nlohmann::json serialize_forest(const Forest& forest);
Forest deserialize_forest(const nlohmann::json& document);

// Human-readable dump, one record per node in breadth-first order:
//   Node 0-1 (Level 2, similarity to root 0.2774)
//   <content>
std::string render_tree_dump(const Tree& tree, const std::map<std::string, double>& similarity_to_root);
// Same records as JSON: [{id, level, content, similarity_to_root}, ...].
nlohmann::json tree_dump_json(const Tree& tree, const std::map<std::string, double>& similarity_to_root);

}  // namespace sctree
