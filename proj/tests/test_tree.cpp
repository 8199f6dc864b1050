#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <set>

#include "oracles.hpp"
#include "sctree/errors.hpp"
#include "sctree/transform.hpp"
#include "sctree/tree.hpp"

using namespace sctree;

namespace {

std::vector<OperationPair> make_pairs(std::size_t k) {
  std::vector<OperationPair> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    pairs.push_back({"forward " + std::to_string(i), "inverse " + std::to_string(i), "op" + std::to_string(i)});
  }
  return pairs;
}

Node make_root(std::string content) {
  Node root;
  root.id = "whatever";
  root.depth = 7;
  root.content = std::move(content);
  return root;
}

// Appends "/<label>" so every node records the pair sequence that produced it.
class LabelTransformer final : public Transformer {
 public:
  mutable std::atomic<int> calls{0};

 protected:
  std::string transform(std::string_view content, const OperationPair& pair) const override {
    ++calls;
    return std::string(content) + "/" + pair.label;
  }
};

class ThrowOnLabel final : public Transformer {
 public:
  explicit ThrowOnLabel(std::string label) : label_(std::move(label)) {}

 protected:
  std::string transform(std::string_view content, const OperationPair& pair) const override {
    if (pair.label == label_) throw std::runtime_error("backend down");
    return std::string(content) + "/" + pair.label;
  }

 private:
  std::string label_;
};

}  // namespace

TEST(TreeIds, ChildIdNaming) {
  EXPECT_EQ(child_id("root", 2), "2");
  EXPECT_EQ(child_id("2", 0), "2-0");
  EXPECT_EQ(child_id("2-0", 11), "2-0-11");
}

TEST(TreeIds, CompleteTreeSizeMatchesOracle) {
  for (std::size_t k = 1; k <= 5; ++k) {
    for (int d = 1; d <= 6; ++d) EXPECT_EQ(complete_tree_size(k, d), oracle::tree_size(k, d)) << k << " " << d;
  }
  EXPECT_EQ(complete_tree_size(3, 3), 40u);
  EXPECT_EQ(complete_tree_size(1, 12), 13u);
}

TEST(TreeBuild, IdentityShapeForAllSmallConfigurations) {
  const MockTransformer identity(MockChannel::identity());
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 1; k <= 3; ++k) {
    for (int d = 1; d <= 4; ++d) {
      const auto pairs = make_pairs(k);
      const Tree tree = build_tree(make_root("hello world"), pairs, d, identity);
      const std::size_t expected = oracle::tree_size(k, d);
      EXPECT_EQ(tree.nodes().size(), expected);
      EXPECT_EQ(tree.edges().size(), expected - 1);
      EXPECT_EQ(tree.branching(), k);
      EXPECT_EQ(tree.depth_limit(), d);
      for (const auto& node : tree.nodes()) EXPECT_EQ(node.content, "hello world");
    }
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(TreeBuild, BreadthFirstOrderAndContentLineage) {
  LabelTransformer t;
  const auto pairs = make_pairs(2);
  const Tree tree = build_tree(make_root("r"), pairs, 3, t);
  EXPECT_EQ(t.calls.load(), 14);
  ASSERT_EQ(tree.nodes().size(), 15u);
  EXPECT_EQ(tree.root().id, "root");
  EXPECT_EQ(tree.root().depth, 0);
  const std::vector<std::string> first_ids = {"root", "0", "1", "0-0", "0-1", "1-0", "1-1", "0-0-0"};
  for (std::size_t i = 0; i < first_ids.size(); ++i) EXPECT_EQ(tree.nodes()[i].id, first_ids[i]);
  EXPECT_EQ(tree.node("1-0-1").content, "r/op1/op0/op1");
  EXPECT_EQ(tree.node("1-0-1").depth, 3);
  int previous = 0;
  for (const auto& node : tree.nodes()) {
    EXPECT_GE(node.depth, previous);
    previous = node.depth;
  }
  for (const auto& edge : tree.edges()) {
    EXPECT_EQ(edge.child_id, child_id(edge.parent_id, edge.pair_index));
    EXPECT_EQ(tree.node(edge.child_id).depth, tree.node(edge.parent_id).depth + 1);
  }
  EXPECT_TRUE(tree.contains("1-1-1"));
  EXPECT_FALSE(tree.contains("2"));
  EXPECT_THROW(tree.node("2"), std::out_of_range);
}

TEST(TreeBuild, InputsPropagateFromRoot) {
  Node root = make_root("def main(x): return x");
  root.inputs = {TestInput{{1}}, TestInput{{"a"}}};
  const MockTransformer identity(MockChannel::identity());
  const Tree tree = build_tree(root, make_pairs(2), 2, identity, {TaskKind::programming, 1});
  EXPECT_EQ(tree.task_kind(), TaskKind::programming);
  for (const auto& node : tree.nodes()) EXPECT_EQ(node.inputs, root.inputs);
}

TEST(TreeBuild, FailuresBecomeSentinelAndPropagate) {
  const ThrowOnLabel t("op1");
  const Tree tree = build_tree(make_root("r"), make_pairs(2), 3, t);
  EXPECT_EQ(tree.node("1").content, "None");
  EXPECT_EQ(tree.node("1-0").content, "None");
  EXPECT_EQ(tree.node("1-0-0").content, "None");
  EXPECT_EQ(tree.node("0-0").content, "r/op0/op0");
  EXPECT_EQ(tree.node("0-1").content, "None");
}

TEST(TreeBuild, ParallelBuildEqualsSerial) {
  const MockTransformer t(MockChannel::seeded_word_dropout(0.2, 9));
  const auto pairs = make_pairs(3);
  const Node root = make_root("one two three four five six seven eight nine ten eleven twelve");
  const Tree serial = build_tree(root, pairs, 4, t, {TaskKind::translation, 1});
  const Tree parallel = build_tree(root, pairs, 4, t, {TaskKind::translation, 8});
  EXPECT_EQ(serial, parallel);
}

TEST(TreeBuild, RejectsBadConfiguration) {
  const MockTransformer identity(MockChannel::identity());
  const auto pairs = make_pairs(2);
  EXPECT_THROW(build_tree(make_root("x"), pairs, 0, identity), ConfigError);
  EXPECT_THROW(build_tree(make_root("x"), std::vector<OperationPair>{}, 2, identity), ConfigError);
}

TEST(TreeValidation, ConstructorRejectsBrokenStructure) {
  const MockTransformer identity(MockChannel::identity());
  const Tree good = build_tree(make_root("x"), make_pairs(2), 2, identity);

  auto nodes = good.nodes();
  auto edges = good.edges();
  EXPECT_NO_THROW(Tree(good.task_kind(), good.pairs(), 2, nodes, edges));

  auto missing = nodes;
  missing.pop_back();
  EXPECT_THROW(Tree(good.task_kind(), good.pairs(), 2, missing, edges), ConfigError);

  auto bad_edges = edges;
  bad_edges[0].pair_index = 1;
  EXPECT_THROW(Tree(good.task_kind(), good.pairs(), 2, nodes, bad_edges), ConfigError);

  auto dup = nodes;
  dup[2].id = dup[1].id;
  EXPECT_THROW(Tree(good.task_kind(), good.pairs(), 2, dup, edges), ConfigError);

  auto bad_depth = nodes;
  bad_depth[3].depth = 1;
  EXPECT_THROW(Tree(good.task_kind(), good.pairs(), 2, bad_depth, edges), ConfigError);

  auto bad_inputs = nodes;
  bad_inputs[4].inputs = {TestInput{{1}}};
  EXPECT_THROW(Tree(good.task_kind(), good.pairs(), 2, bad_inputs, edges), ConfigError);
}

TEST(TreePaths, RootOnlyCounts) {
  const MockTransformer identity(MockChannel::identity());
  const Tree tree = build_tree(make_root("x"), make_pairs(3), 3, identity);
  for (int n = 1; n <= 3; ++n) {
    const auto paths = enumerate_paths(tree, n, PathAnchor::root_only);
    std::size_t expected = 1;
    for (int i = 0; i < n; ++i) expected *= 3;
    EXPECT_EQ(paths.size(), expected);
    std::set<std::string> ends;
    for (const auto& p : paths) {
      EXPECT_EQ(p.length(), static_cast<std::size_t>(n));
      EXPECT_EQ(p.first(), "root");
      EXPECT_EQ(tree.node(p.last()).depth, n);
      ends.insert(p.last());
    }
    EXPECT_EQ(ends.size(), paths.size());
  }
  const auto p2 = enumerate_paths(tree, 2, PathAnchor::root_only);
  EXPECT_EQ(p2.front().node_ids, (std::vector<std::string>{"root", "0", "0-0"}));
  EXPECT_EQ(p2.back().node_ids, (std::vector<std::string>{"root", "2", "2-2"}));
}

TEST(TreePaths, AllChainsCounts) {
  const MockTransformer identity(MockChannel::identity());
  for (std::size_t k = 1; k <= 3; ++k) {
    const Tree tree = build_tree(make_root("x"), make_pairs(k), 4, identity);
    for (int n = 1; n <= 4; ++n) {
      // chains start at any depth s <= D - n: sum_s k^s * k^n
      std::size_t expected = 0, level = 1, kn = 1;
      for (int i = 0; i < n; ++i) kn *= k;
      for (int s = 0; s <= 4 - n; ++s) {
        expected += level * kn;
        level *= k;
      }
      const auto paths = enumerate_paths(tree, n, PathAnchor::all_chains);
      EXPECT_EQ(paths.size(), expected) << "k=" << k << " n=" << n;
      for (const auto& p : paths) {
        ASSERT_EQ(p.length(), static_cast<std::size_t>(n));
        for (std::size_t i = 1; i < p.node_ids.size(); ++i) {
          EXPECT_TRUE(p.node_ids[i].starts_with(p.node_ids[i - 1] == "root" ? "" : p.node_ids[i - 1] + "-"));
        }
      }
    }
  }
}

TEST(TreePaths, RejectsOutOfRangeLength) {
  const MockTransformer identity(MockChannel::identity());
  const Tree tree = build_tree(make_root("x"), make_pairs(2), 2, identity);
  EXPECT_THROW(enumerate_paths(tree, 0, PathAnchor::root_only), ConfigError);
  EXPECT_THROW(enumerate_paths(tree, 3, PathAnchor::all_chains), ConfigError);
}

TEST(TreePaths, AnchorNames) {
  EXPECT_EQ(to_string(PathAnchor::root_only), "root");
  EXPECT_EQ(to_string(PathAnchor::all_chains), "all");
  EXPECT_EQ(parse_path_anchor("root"), PathAnchor::root_only);
  EXPECT_EQ(parse_path_anchor("all"), PathAnchor::all_chains);
  EXPECT_THROW(parse_path_anchor("leaves"), ConfigError);
}

TEST(TreeJson, SchemaAndRoundTrip) {
  LabelTransformer t;
  Node root = make_root("def main(a): return a");
  root.inputs = {TestInput{{1, 2}}, TestInput{{"s", nullptr, 2.5}}};
  const Tree tree = build_tree(root, make_pairs(2), 2, t, {TaskKind::programming, 1});
  const auto doc = serialize_tree(tree);
  EXPECT_EQ(doc["task_kind"], "programming");
  EXPECT_EQ(doc["branching"], 2);
  EXPECT_EQ(doc["depth_limit"], 2);
  ASSERT_EQ(doc["pairs"].size(), 2u);
  EXPECT_EQ(doc["pairs"][1]["label"], "op1");
  EXPECT_EQ(doc["nodes"].size(), 7u);
  EXPECT_EQ(doc["nodes"][0]["id"], "root");
  EXPECT_EQ(doc["edges"].size(), 6u);
  EXPECT_EQ(doc["edges"][0]["parent"], "root");
  EXPECT_EQ(deserialize_tree(doc), tree);
  EXPECT_EQ(deserialize_tree(nlohmann::json::parse(doc.dump())), tree);
}

TEST(TreeJson, ParseErrorsNameTheField) {
  const MockTransformer identity(MockChannel::identity());
  const auto doc = serialize_tree(build_tree(make_root("x"), make_pairs(2), 2, identity));

  const auto field_of = [](const nlohmann::json& d) -> std::string {
    try {
      deserialize_tree(d);
    } catch (const ParseError& e) {
      return e.field();
    }
    return "<no error>";
  };

  auto d1 = doc;
  d1.erase("task_kind");
  EXPECT_EQ(field_of(d1), "task_kind");

  auto d2 = doc;
  d2["nodes"][3]["content"] = 5;
  EXPECT_EQ(field_of(d2), "nodes[3].content");

  auto d3 = doc;
  d3["depth_limit"] = "two";
  EXPECT_EQ(field_of(d3), "depth_limit");

  auto d4 = doc;
  d4["edges"].erase(d4["edges"].size() - 1);
  EXPECT_NE(field_of(d4), "<no error>");

  auto d5 = doc;
  d5["branching"] = 3;
  EXPECT_NE(field_of(d5), "<no error>");

  EXPECT_NE(field_of(nlohmann::json::array()), "<no error>");
}

TEST(Forest, ValidateAndRoundTrip) {
  const MockTransformer identity(MockChannel::identity());
  const auto pairs = make_pairs(2);
  Forest forest;
  forest.task_kind = TaskKind::translation;
  forest.trees.push_back(build_tree(make_root("a"), pairs, 2, identity));
  forest.trees.push_back(build_tree(make_root("b"), pairs, 2, identity));
  EXPECT_NO_THROW(forest.validate());
  EXPECT_EQ(deserialize_forest(serialize_forest(forest)).trees, forest.trees);

  Forest dup = forest;
  dup.trees.push_back(build_tree(make_root("a"), pairs, 2, identity));
  EXPECT_THROW(dup.validate(), ConfigError);

  Forest shape = forest;
  shape.trees.push_back(build_tree(make_root("c"), pairs, 3, identity));
  EXPECT_THROW(shape.validate(), ConfigError);

  Forest task = forest;
  task.trees.push_back(build_tree(make_root("c"), pairs, 2, identity, {TaskKind::programming, 1}));
  EXPECT_THROW(task.validate(), ConfigError);
}

TEST(TreeDump, TextAndJson) {
  const MockTransformer identity(MockChannel::identity());
  const Tree tree = build_tree(make_root("hello"), make_pairs(1), 1, identity);
  const std::map<std::string, double> sims = {{"root", 1.0}, {"0", 0.27741}};
  const std::string text = render_tree_dump(tree, sims);
  EXPECT_NE(text.find("Root (Level 0, similarity to root 1.0000)\nhello\n"), std::string::npos) << text;
  EXPECT_NE(text.find("Node 0 (Level 1, similarity to root 0.2774)"), std::string::npos) << text;
  const auto j = tree_dump_json(tree, sims);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["id"], "0");
  EXPECT_EQ(j[1]["level"], 1);
  EXPECT_EQ(j[1]["content"], "hello");
  EXPECT_DOUBLE_EQ(j[1]["similarity_to_root"].get<double>(), 0.27741);
}
