// One PASS/FAIL line per acceptance criterion; non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sctree/bench.hpp"
#include "sctree/correlation.hpp"
#include "sctree/exec.hpp"
#include "sctree/report.hpp"
#include "sctree/scoring.hpp"
#include "sctree/transform.hpp"
#include "sctree/tree.hpp"

using namespace sctree;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::vector<OperationPair> make_pairs(std::size_t k) {
  std::vector<OperationPair> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    pairs.push_back({"forward " + std::to_string(i), "inverse " + std::to_string(i), "op" + std::to_string(i)});
  }
  return pairs;
}

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

Outcome tree_shape() {
  Outcome o;
  const MockTransformer identity(MockChannel::identity());
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 1; k <= 3; ++k) {
    for (int d = 1; d <= 4; ++d) {
      Node root;
      root.content = "shape check";
      const Tree t = build_tree(root, make_pairs(k), d, identity);
      const std::size_t want = oracle::tree_size(k, d);
      if (t.nodes().size() != want || t.edges().size() != want - 1) {
        o.fail("k=" + std::to_string(k) + " D=" + std::to_string(d) + ": " + std::to_string(t.nodes().size()) +
               " nodes, " + std::to_string(t.edges().size()) + " edges");
      }
    }
  }
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (ms >= 1000.0) o.fail("took " + fmt(ms) + " ms");
  if (o.pass) o.detail = "12 configurations, " + fmt(std::round(ms * 1000) / 1000) + " ms";
  return o;
}

Outcome identity_forest() {
  Outcome o;
  const MockTransformer identity(MockChannel::identity());
  Forest forest;
  for (int i = 0; i < 10; ++i) {
    Node root;
    root.content = "Root paragraph number " + std::to_string(i) + " about a quiet harbour at dawn.";
    forest.trees.push_back(build_tree(root, make_pairs(3), 3, identity));
  }
  const ExecHarness harness;
  HashedEmbedder embedder;
  Scorer scorer(harness, &embedder);
  std::string cells;
  for (const char* name : {"embedding", "bleu", "levenshtein"}) {
    MetricScores scores;
    scores.metric = name;
    std::vector<std::vector<double>> per_tree;
    for (const auto& t : forest.trees) per_tree.push_back(scorer.tree_profile(t, 3, PathAnchor::root_only, SimilarityMetric::parse(name)));
    scores.per_tree = {per_tree, per_tree, per_tree};
    finalize_metric_scores(scores, 3);
    for (const auto& s : scores.stats) {
      const auto cell = format_percent_cell(s);
      if (s.mean != 1.0 || s.std != 0.0 || cell != "100.0±0.0") o.fail(std::string(name) + " gave " + cell);
    }
    cells += std::string(cells.empty() ? "" : ", ") + name + " " + format_percent_cell(scores.stats[0]);
  }
  if (o.pass) o.detail = cells;
  return o;
}

Outcome monotone_degradation() {
  Outcome o;
  std::string content;
  for (int i = 0; i < 50; ++i) content += (i ? " " : "") + std::string("tok") + std::to_string(i);
  Node root;
  root.content = content;
  const MockTransformer drop(MockChannel::drop_last_words(1));
  const Tree tree = build_tree(root, make_pairs(3), 3, drop);
  const ExecHarness harness;
  Scorer scorer(harness, nullptr);
  const auto c = scorer.tree_profile(tree, 3, PathAnchor::root_only, SimilarityMetric::parse("bleu"));
  if (!(c[0] > c[1] && c[1] > c[2])) o.fail("C1=" + fmt(c[0]) + " C2=" + fmt(c[1]) + " C3=" + fmt(c[2]));
  if (o.pass) o.detail = "C1=" + fmt(c[0]) + " > C2=" + fmt(c[1]) + " > C3=" + fmt(c[2]);
  return o;
}

Outcome bleu_oracle() {
  Outcome o;
  const std::pair<const char*, const char*> pairs[] = {
      {"a b c d", "a b c d e"},
      {"the cat sat on the mat", "the cat sat on the mat"},
      {"", "a b"},
      {"a b", ""},
      {"a", "a"},
      {"a", "b"},
      {"a b", "b a"},
      {"a b", "a b c d"},
      {"the the the the", "the cat"},
      {"a b c", "a b d"},
      {"x y z w", "a b c d"},
      {"a b c d e", "a b c d"},
      {"a a a", "a a"},
      {"b c", "a b c d"},
      {"a b c d", "a b c d e f g h"},
      {"ž é ü", "ž é ü"},
      {"a  b\tc\n", "a b c"},
      {"A b", "a b"},
      {"a b a b", "a b"},
      {"the cat is on the mat", "there is a cat on the mat"},
      {"the quick brown fox jumps over the lazy dog", "the quick brown fox jumped over the lazy dog"},
      {"it is a guide to action which ensures that the military always obeys the commands of the party",
       "it is a guide to action that ensures that the military will forever heed party commands"},
      {"def main ( n ) : return n * 2", "def main ( n ) : return 2 * n"},
      {"42\n43\n<error>", "42\n44\n<error>"},
      {"one two three four five six", "six five four three two one"},
  };
  double worst = 0.0;
  for (const auto& [h, r] : pairs) {
    const double diff = std::fabs(bleu(h, r) - static_cast<double>(oracle::bleu(h, r)));
    worst = std::max(worst, diff);
    if (diff > 1e-9) o.fail(std::string("'") + h + "' vs '" + r + "' off by " + fmt(diff));
  }
  const double anchor = bleu("a b c d", "a b c d e");
  if (std::fabs(anchor - std::exp(-0.25)) > 1e-9) o.fail("anchor pair gave " + fmt(anchor));
  if (o.pass) o.detail = "25 pairs, max |diff| " + fmt(worst) + ", anchor " + fmt(anchor);
  return o;
}

Outcome functional_equivalence() {
  Outcome o;
  TestInputs inputs;
  for (int i = 0; i < 20; ++i) inputs.push_back(TestInput{{i * 5 - 37, i % 9}});
  const Node loop{"root", "def main(a, b):\n    total = 0\n    for _ in range(b):\n        total += a\n    return total\n", inputs, 0};
  const Node mul{"0", "def main(a, b):\n    return a * b\n", inputs, 1};
  const Node off{"1", "def main(a, b):\n    total = 0\n    for _ in range(b + 1):\n        total += a\n    return total\n", inputs, 1};
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 4});
  HashedEmbedder embedder;
  Scorer scorer(harness, &embedder, nullptr, {kDefaultCaseTimeout, 4});
  std::string detail;
  for (const char* name : {"embedding", "bleu", "levenshtein"}) {
    const auto m = SimilarityMetric::parse(name);
    const double same = scorer.node_pair_similarity(loop, mul, TaskKind::programming, m);
    const double mutant = scorer.node_pair_similarity(loop, off, TaskKind::programming, m);
    if (same != 1.0) o.fail(std::string(name) + " equivalent pair scored " + fmt(same));
    if (!(mutant < 1.0)) o.fail(std::string(name) + " mutant scored " + fmt(mutant));
    detail += std::string(detail.empty() ? "" : ", ") + name + " " + fmt(same) + "/" + fmt(mutant);
  }
  if (o.pass) o.detail = "equivalent/mutant: " + detail;
  return o;
}

Outcome execution_protocol() {
  Outcome o;
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 1});
  const auto timeout = std::chrono::milliseconds(2000);
  const auto case_of = [&](const char* code) { return harness.run_case(code, json::array(), "case-0", timeout); };

  const auto no_main = case_of("def helper():\n    return 1\n");
  if (no_main.status != CaseStatus::error) o.fail("no-main gave " + std::string(to_string(no_main.status)));
  const auto raises = case_of("def main():\n    raise RuntimeError('boom')\n");
  if (raises.status != CaseStatus::error) o.fail("raise gave " + std::string(to_string(raises.status)));

  const auto start = std::chrono::steady_clock::now();
  const auto spin = case_of("def main():\n    while True:\n        pass\n");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (spin.status != CaseStatus::timeout) o.fail("infinite loop gave " + std::string(to_string(spin.status)));
  if (wall > 2.5) o.fail("timeout took " + fmt(wall) + " s");

  const auto printer = case_of("def main():\n    print('should not leak')\n    return 'printed'\n");
  if (printer.status != CaseStatus::ok || printer.rendered != "printed") {
    o.fail("print gave " + std::string(to_string(printer.status)) + " '" + printer.rendered + "'");
  }
  if (o.pass) {
    char b[64];
    std::snprintf(b, sizeof b, "%.3f", wall);
    o.detail = "error/error/timeout(" + std::string(b) + " s)/ok";
  }
  return o;
}

Outcome correlation_fixture() {
  Outcome o;
  const struct {
    const char* file;
    double pinned;
  } fixtures[] = {{"cs_uk.csv", 0.9982111469570905}, {"en_zh.csv", 0.9218392722354907}};
  std::string detail;
  for (const auto& f : fixtures) {
    const auto table = MetricTable::load_csv(std::string(SCTREE_FIXTURE_DIR) + "/" + f.file);
    const double r = pearson(table.column("c3_emb"), table.column("cometkiwi"));
    if (!(r > 0.7)) o.fail(std::string(f.file) + " r=" + fmt(r));
    if (std::fabs(r - f.pinned) > 1e-12) o.fail(std::string(f.file) + " r=" + fmt(r) + " pinned " + fmt(f.pinned));
    detail += std::string(detail.empty() ? "" : ", ") + f.file + " r=" + fmt(r);
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome linearity() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t trees = 1 + rng() % 30;
    MetricScores s;
    s.metric = "bleu";
    s.per_tree.assign(1, std::vector<std::vector<double>>(trees, std::vector<double>(3)));
    for (auto& t : s.per_tree[0]) {
      for (double& v : t) v = u(rng);
    }
    finalize_metric_scores(s, 3);
    for (std::size_t n = 0; n < 3; ++n) {
      std::vector<double> column;
      for (const auto& t : s.per_tree[0]) column.push_back(t[n]);
      const double diff = std::fabs(s.forest[0][n] - static_cast<double>(oracle::mean(column)));
      worst = std::max(worst, diff);
      if (diff > 1e-12) o.fail("trial " + std::to_string(trial) + " off by " + fmt(diff));
    }
  }
  if (o.pass) o.detail = "100 score sets, max |diff| " + fmt(worst);
  return o;
}

Outcome persistence() {
  Outcome o;
  std::mt19937_64 rng(4242);
  const char* alphabet[] = {"a", " ", "\n", "\"", "'", ":", "#", "é", "日", "\\", "None", "- ", "{", "1.5", "true"};
  const auto text = [&](std::size_t max) {
    std::string s;
    for (std::size_t i = 0, n = rng() % max; i < n; ++i) s += alphabet[rng() % std::size(alphabet)];
    return s.empty() ? std::string("x") : s;
  };
  const auto value = [&]() -> json {
    switch (rng() % 6) {
      case 0: return nullptr;
      case 1: return rng() % 2 == 0;
      case 2: return static_cast<std::int64_t>(rng()) >> (rng() % 64);
      case 3: return std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(rng() % 80));
      case 4: return text(8);
      default: return json::array({text(4), static_cast<std::int64_t>(rng() % 100)});
    }
  };
  const auto args = [&] {
    json a = json::array();
    for (std::size_t i = 0, n = rng() % 4; i < n; ++i) a.push_back(value());
    return a;
  };

  int trees_ok = 0, benches_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 1 + rng() % 3;
    const int depth = 1 + static_cast<int>(rng() % 3);
    std::vector<OperationPair> pairs;
    for (std::size_t p = 0; p < k; ++p) pairs.push_back({text(20), text(20), "pair" + std::to_string(p) + text(3)});
    Node root;
    root.content = text(40);
    for (std::size_t c = 0, n = rng() % 4; c < n; ++c) root.inputs.push_back(TestInput{args()});
    const MockTransformer channel(MockChannel::seeded_word_dropout(0.3, rng()));
    const auto kind = rng() % 2 ? TaskKind::programming : TaskKind::translation;
    const Tree tree = build_tree(root, pairs, depth, channel, {kind, 1});
    if (deserialize_tree(json::parse(serialize_tree(tree).dump())) == tree) {
      ++trees_ok;
    } else {
      o.fail("tree instance " + std::to_string(i));
    }

    BenchmarkFile bench;
    bench.task_kind = kind;
    bench.evaluator_model = text(10);
    bench.pairs = pairs;
    for (std::size_t r = 0, n = 1 + rng() % 4; r < n; ++r) {
      RootSpec spec;
      spec.content = "def main(*a):\n    return " + std::to_string(r) + "  # " + text(20);
      if (kind == TaskKind::programming) {
        spec.problem = text(30);
        for (std::size_t c = 0; c < kProgrammingInputCount; ++c) spec.inputs.push_back(TestInput{args()});
      }
      bench.roots.push_back(spec);
    }
    try {
      if (benchmark_from_yaml(benchmark_to_yaml(bench)) == bench) {
        ++benches_ok;
      } else {
        o.fail("benchmark instance " + std::to_string(i) + " differs");
      }
    } catch (const std::exception& e) {
      o.fail("benchmark instance " + std::to_string(i) + ": " + e.what());
    }
  }
  if (o.pass) o.detail = std::to_string(trees_ok) + " trees, " + std::to_string(benches_ok) + " benchmarks";
  return o;
}

Outcome worker_shim() {
  Outcome o;
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 1});
  const auto out = harness.run_case("def main(a, b):\n    return a * b\n", json::array({3, 4}), "case-0",
                                    std::chrono::milliseconds(2000));
  if (out.status != CaseStatus::ok || out.rendered != "12") o.fail("got '" + out.rendered + "'");
  if (o.pass) o.detail = "product(3, 4) = " + out.rendered;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"tree-shape", tree_shape},
      {"identity-forest", identity_forest},
      {"monotone-degradation", monotone_degradation},
      {"bleu-oracle", bleu_oracle},
      {"functional-equivalence", functional_equivalence},
      {"execution-protocol", execution_protocol},
      {"correlation-fixture", correlation_fixture},
      {"linearity", linearity},
      {"persistence", persistence},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  // not part of the primary criteria: reported, never fails the run
  Outcome shim;
  try {
    shim = worker_shim();
  } catch (const std::exception& e) {
    shim.fail(e.what());
  }
  std::printf("%s worker-shim (optional): %s\n", shim.pass ? "PASS" : "FAIL", shim.detail.c_str());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
