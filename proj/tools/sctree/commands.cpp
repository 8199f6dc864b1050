#include "commands.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>

#include "manifest.hpp"
#include "mock_evaluator.hpp"
#include "sctree/bench.hpp"
#include "sctree/correlation.hpp"
#include "sctree/diagnostics.hpp"
#include "sctree/exec.hpp"
#include "sctree/extract.hpp"
#include "sctree/report.hpp"
#include "sctree/text.hpp"
#include "sctree/transform.hpp"

namespace sctree::cli {

namespace fs = std::filesystem;
using nlohmann::json;

GatewayConfig RoleOptions::gateway(const std::string& role, std::size_t jobs) const {
  if (base_url.empty() || model.empty()) {
    throw ConfigError("--" + role + "-base-url and --" + role + "-model must both be given");
  }
  GatewayConfig config;
  config.base_url = base_url;
  config.model_name = model;
  config.max_parallel = std::max<std::size_t>(1, jobs);
  config.api_key = GatewayConfig::api_key_from_env();
  config.validate();
  return config;
}

std::vector<std::string> ExecOptions::worker_command() const {
  if (!worker.empty()) return worker;
  if (const char* env = std::getenv("SCTREE_WORKER"); env && *env) {
    std::vector<std::string> argv;
    for (const auto part : text::split_whitespace(env)) argv.emplace_back(part);
    return argv;
  }
  std::error_code ec;
  const auto self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    const auto sibling = self.parent_path() / "sctree-stub-worker";
    if (fs::exists(sibling, ec)) return {sibling.string()};
  }
  return {};
}

void RunConfig::validate(std::size_t benchmark_pairs, std::size_t benchmark_roots) const {
  if (depth < 1) throw ConfigError("--depth must be at least 1");
  if (n_max < 1) throw ConfigError("--n-max must be at least 1");
  if (n_max > depth) {
    throw ConfigError("--n-max (" + std::to_string(n_max) + ") must not exceed --depth (" + std::to_string(depth) + ")");
  }
  if (branching != benchmark_pairs) {
    throw ConfigError("--branching (" + std::to_string(branching) + ") must equal the benchmark's pair count (" +
                      std::to_string(benchmark_pairs) + ")");
  }
  if (roots < 1) throw ConfigError("--roots must be at least 1");
  if (roots > benchmark_roots) {
    throw ConfigError("--roots (" + std::to_string(roots) + ") exceeds the benchmark's " +
                      std::to_string(benchmark_roots) + " roots");
  }
  if (runs < 1) throw ConfigError("--runs must be at least 1");
  if (timeout_ms < 1) throw ConfigError("--timeout-ms must be positive");
}

json RunConfig::to_json() const {
  json evaluatee_doc;
  if (!mock.empty()) {
    evaluatee_doc = {{"mock", mock}};
  } else {
    evaluatee_doc = {{"base_url", evaluatee.base_url}, {"model", evaluatee.model}, {"temperature", temperature},
                     {"seed", seed}};
  }
  return {{"task", to_string(task_kind)},
          {"benchmark", {{"path", benchmark.string()}, {"fingerprint", benchmark_fingerprint}}},
          {"evaluatee", std::move(evaluatee_doc)},
          {"depth", depth},
          {"branching", branching},
          {"n_max", n_max},
          {"roots", roots},
          {"runs", runs},
          {"timeout_ms", timeout_ms}};
}

namespace {

// Counts evaluatee requests so a tree built while the endpoint was down is reported as failed
// instead of a tree full of sentinels.
class CountingChat final : public ChatClient {
 public:
  explicit CountingChat(ChatClient& inner) : inner_(inner) {}

  std::string chat(std::string_view system_text, std::string_view user_text) override {
    ++calls_;
    try {
      return inner_.chat(system_text, user_text);
    } catch (const GatewayError&) {
      ++failures_;
      throw;
    } catch (const ProtocolError&) {
      ++failures_;
      throw;
    }
  }

  void reset() {
    calls_ = 0;
    failures_ = 0;
  }
  bool all_failed() const { return calls_ > 0 && failures_ == calls_; }

 private:
  ChatClient& inner_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> failures_{0};
};

std::string fingerprint(const std::string& bytes) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(text::fnv1a64(bytes)));
  return buffer;
}

void print_diagnostics(const Diagnostics& diagnostics, std::ostream& err) {
  for (const auto& d : diagnostics.snapshot()) err << "warning: [" << d.source << "] " << d.message << "\n";
}

bool is_gateway_class(const std::exception& e) {
  return dynamic_cast<const GatewayError*>(&e) || dynamic_cast<const ProtocolError*>(&e) ||
         dynamic_cast<const HarnessError*>(&e);
}

Node prepare_root(const RootSpec& spec, TaskKind kind, const ExecHarness& harness, std::chrono::milliseconds timeout) {
  Node root{std::string(kRootId), spec.content, spec.inputs, 0};
  if (kind == TaskKind::translation && defines_main(spec.content)) {
    const auto transcript = harness.execute(spec.content, make_cases(spec.inputs, timeout), kind);
    const auto& outcome = transcript.per_case.front();
    if (outcome.status != CaseStatus::ok) {
      throw ConfigError("root paragraph could not be produced: " + std::string(to_string(outcome.status)) +
                        (outcome.detail.empty() ? "" : " (" + outcome.detail + ")"));
    }
    root.content = outcome.rendered;
  }
  return root;
}

std::size_t count_sentinels(const Tree& tree) {
  return static_cast<std::size_t>(
      std::count_if(tree.nodes().begin(), tree.nodes().end(), [](const Node& n) { return is_sentinel(n.content); }));
}

PathAnchor parse_paths_flag(const std::string& text) {
  if (text == "root") return PathAnchor::root_only;
  if (text == "all") return PathAnchor::all_chains;
  throw ConfigError("--paths must be 'root' or 'all'");
}

std::vector<SimilarityMetric> parse_metrics(const std::vector<std::string>& names) {
  std::vector<SimilarityMetric> metrics;
  for (const auto& name : names) {
    auto metric = SimilarityMetric::parse(name);
    if (std::find(metrics.begin(), metrics.end(), metric) != metrics.end()) {
      throw ConfigError("--metric " + name + " given twice");
    }
    metrics.push_back(metric);
  }
  return metrics;
}

struct LoadedRun {
  Manifest manifest;
  TaskKind task_kind;
  int depth;
  int n_max;
};

LoadedRun load_run(const fs::path& dir) {
  if (!fs::exists(dir / Manifest::kFileName)) throw ConfigError(dir.string() + " holds no run (manifest.json missing)");
  LoadedRun run{Manifest::load(dir), TaskKind::translation, 0, 0};
  try {
    run.task_kind = parse_task_kind(run.manifest.config.at("task").get<std::string>());
    run.depth = run.manifest.config.at("depth").get<int>();
    run.n_max = run.manifest.config.at("n_max").get<int>();
  } catch (const json::exception& e) {
    throw ParseError("manifest.config", e.what());
  }
  return run;
}

Forest load_forest(const fs::path& dir, const Manifest& manifest, std::size_t r) {
  if (manifest.forests[r].empty()) {
    const bool failed = std::any_of(manifest.trees.begin(), manifest.trees.end(), [&](const TreeRecord& t) {
      return t.run == r && t.status == TreeStatus::failed;
    });
    if (failed) throw PartialFailure("run " + std::to_string(r) + " has failed trees and no forest");
    throw ConfigError("run " + std::to_string(r) + " is incomplete; finish it with 'sctree run --resume'");
  }
  return deserialize_forest(read_json(dir / manifest.forests[r]));
}

// Embedding backend for scoring: the configured endpoint, or the offline hashed embedder.
struct EmbedderStack {
  std::unique_ptr<HttpGateway> gateway;
  HashedEmbedder hashed;
  std::unique_ptr<CachingEmbedder> cache;

  EmbedderStack(const RoleOptions& role, std::size_t jobs) {
    if (role.configured()) {
      gateway = std::make_unique<HttpGateway>(role.gateway("embedder", jobs));
      cache = std::make_unique<CachingEmbedder>(*gateway);
    } else {
      cache = std::make_unique<CachingEmbedder>(hashed);
    }
  }
};

}  // namespace

// ---------------------------------------------------------------------------------------------

int cmd_gen_bench(const GenBenchOptions& options, std::ostream& out, std::ostream& err) {
  const TaskKind kind = parse_task_kind(options.task);
  if (options.roots < 1) throw ConfigError("--roots must be at least 1");
  if (options.out.empty()) throw ConfigError("--out is required");
  if (options.mock_evaluator && options.evaluator.configured()) {
    throw ConfigError("--mock-evaluator cannot be combined with --evaluator-base-url/--evaluator-model");
  }

  std::unique_ptr<ChatClient> evaluator;
  std::string evaluator_name = "mock";
  if (options.mock_evaluator) {
    evaluator = std::make_unique<MockEvaluator>(kind);
  } else {
    evaluator = std::make_unique<HttpGateway>(options.evaluator.gateway("evaluator", options.exec.jobs));
    evaluator_name = options.evaluator.model;
  }
  const ExecHarness harness({options.exec.worker_command(), options.exec.jobs});
  Diagnostics diagnostics;

  BenchmarkFile file;
  file.task_kind = kind;
  file.evaluator_model = evaluator_name;
  file.pairs = propose_operation_pairs(kind, *evaluator, &diagnostics);
  GenerationOptions gen;
  gen.root_count = options.roots;
  gen.max_parallel = options.exec.jobs;
  gen.max_attempts = options.attempts;
  gen.case_timeout = options.exec.timeout();
  try {
    file.roots = generate_roots(MetaPrompt::default_for(kind), *evaluator, harness, gen, &diagnostics);
  } catch (const BenchmarkGenerationError&) {
    print_diagnostics(diagnostics, err);
    throw;
  }
  file.validate();
  save_benchmark(file, options.out);
  print_diagnostics(diagnostics, err);
  out << "wrote " << file.roots.size() << " " << to_string(kind) << " roots and " << file.pairs.size()
      << " operation pairs to " << options.out.string() << "\n";
  return kOk;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  if (options.bench.empty()) throw ConfigError("--bench is required");
  if (options.out.empty()) throw ConfigError("--out is required");
  const BenchmarkFile bench = load_benchmark(options.bench);

  RunConfig config;
  config.task_kind = bench.task_kind;
  if (options.task && parse_task_kind(*options.task) != bench.task_kind) {
    throw ConfigError("--task " + *options.task + " does not match the benchmark's task '" +
                      std::string(to_string(bench.task_kind)) + "'");
  }
  config.benchmark = options.bench;
  config.benchmark_fingerprint = fingerprint(read_text(options.bench));
  config.mock = options.mock;
  config.evaluatee = options.evaluatee;
  config.temperature = options.temperature;
  config.seed = options.seed;
  config.depth = options.depth;
  config.branching = options.branching.value_or(bench.pairs.size());
  config.n_max = options.n_max;
  config.roots = options.roots;
  config.runs = options.runs;
  config.timeout_ms = options.exec.timeout_ms;
  config.validate(bench.pairs.size(), bench.roots.size());

  if (!options.mock.empty() && options.evaluatee.configured()) {
    throw ConfigError("--mock cannot be combined with --evaluatee-base-url/--evaluatee-model");
  }
  if (options.mock.empty() && !options.evaluatee.configured()) {
    throw ConfigError("give --mock <channel> or --evaluatee-base-url and --evaluatee-model");
  }

  std::unique_ptr<HttpGateway> gateway;
  std::unique_ptr<CountingChat> counting;
  std::unique_ptr<Transformer> transformer;
  Diagnostics diagnostics;
  if (!options.mock.empty()) {
    transformer = std::make_unique<MockTransformer>(MockChannel::parse(options.mock));
  } else {
    auto gateway_config = options.evaluatee.gateway("evaluatee", options.exec.jobs);
    gateway_config.temperature = options.temperature;
    gateway_config.seed = options.seed;
    gateway = std::make_unique<HttpGateway>(gateway_config);
    counting = std::make_unique<CountingChat>(*gateway);
    transformer = std::make_unique<LlmTransformer>(*counting, bench.task_kind, PromptTemplate{}, &diagnostics);
  }

  const fs::path dir = options.out;
  const json config_doc = config.to_json();
  Manifest manifest;
  if (fs::exists(dir / Manifest::kFileName)) {
    if (!options.resume) throw ConfigError(dir.string() + " already holds a run; pass --resume to continue it");
    manifest = Manifest::load(dir);
    if (manifest.config != config_doc) {
      throw ConfigError("configuration differs from the one recorded in " + (dir / Manifest::kFileName).string());
    }
  } else {
    manifest = Manifest::fresh(config_doc, config.runs, config.roots);
  }
  fs::create_directories(dir);
  manifest.save(dir);

  const ExecHarness harness({options.exec.worker_command(), options.exec.jobs});
  std::vector<std::optional<Node>> roots(config.roots);
  BuildOptions build;
  build.task_kind = bench.task_kind;
  build.max_parallel = options.exec.jobs;

  std::size_t skipped = 0;
  for (std::size_t r = 0; r < config.runs; ++r) {
    for (std::size_t t = 0; t < config.roots; ++t) {
      auto& rec = manifest.record(r, t);
      if (rec.status == TreeStatus::done && fs::exists(dir / rec.file)) {
        ++skipped;
        continue;
      }
      try {
        if (!roots[t]) roots[t] = prepare_root(bench.roots[t], bench.task_kind, harness, options.exec.timeout());
        if (counting) counting->reset();
        const Tree tree = build_tree(*roots[t], bench.pairs, config.depth, *transformer, build);
        if (counting && counting->all_failed()) throw GatewayError("every evaluatee request failed", -1);
        write_text_atomic(dir / rec.file, dump_document(serialize_tree(tree)));
        rec.status = TreeStatus::done;
        rec.sentinel_nodes = count_sentinels(tree);
        rec.error_kind.clear();
        rec.error.clear();
      } catch (const Error& e) {
        rec.status = TreeStatus::failed;
        rec.error_kind = is_gateway_class(e) ? "gateway" : "other";
        rec.error = e.what();
        err << "run " << r << " tree " << t << " failed: " << e.what() << "\n";
      }
      manifest.save(dir);
    }
  }

  std::size_t done = 0, failed = 0, gateway_failed = 0;
  for (std::size_t r = 0; r < config.runs; ++r) {
    bool complete = true;
    for (std::size_t t = 0; t < config.roots; ++t) {
      const auto& rec = manifest.record(r, t);
      if (rec.status == TreeStatus::done) {
        ++done;
      } else {
        complete = false;
        ++failed;
        if (rec.error_kind == "gateway") ++gateway_failed;
      }
    }
    manifest.forests[r].clear();
    if (!complete) continue;
    Forest forest;
    forest.task_kind = bench.task_kind;
    for (std::size_t t = 0; t < config.roots; ++t) {
      forest.trees.push_back(deserialize_tree(read_json(dir / manifest.record(r, t).file)));
    }
    forest.validate();
    write_text_atomic(dir / forest_file(r), dump_document(serialize_forest(forest)));
    manifest.forests[r] = forest_file(r);
  }
  manifest.save(dir);
  print_diagnostics(diagnostics, err);

  std::size_t forests = 0;
  for (const auto& f : manifest.forests) forests += f.empty() ? 0 : 1;
  out << "trees: " << done << " done (" << skipped << " reused), " << failed << " failed\n";
  out << "forests: " << forests << " of " << config.runs << " written to " << dir.string() << "\n";
  if (failed == 0) return kOk;
  if (done == 0 && gateway_failed == failed) return kGatewayFailure;
  return kPartialFailure;
}

int cmd_score(const ScoreOptions& options, std::ostream& out, std::ostream& err) {
  const LoadedRun run = load_run(options.run_dir);
  const int n_max = options.n_max.value_or(run.n_max);
  if (n_max < 1 || n_max > run.depth) {
    throw ConfigError("--n-max must be between 1 and the run's depth (" + std::to_string(run.depth) + ")");
  }
  const PathAnchor anchor = parse_paths_flag(options.paths);
  const auto metrics = parse_metrics(options.metrics.empty() ? std::vector<std::string>{"embedding", "bleu"} : options.metrics);

  std::vector<Forest> forests;
  for (std::size_t r = 0; r < run.manifest.runs(); ++r) forests.push_back(load_forest(options.run_dir, run.manifest, r));

  const bool needs_embeddings = std::any_of(metrics.begin(), metrics.end(), [](const SimilarityMetric& m) {
    return m.kind == SimilarityMetric::Kind::embedding_cosine;
  });
  std::unique_ptr<EmbedderStack> embedders;
  if (needs_embeddings) embedders = std::make_unique<EmbedderStack>(options.embedder, options.exec.jobs);

  const ExecHarness harness({options.exec.worker_command(), options.exec.jobs});
  Diagnostics diagnostics;
  Scorer scorer(harness, embedders ? embedders->cache.get() : nullptr, &diagnostics,
                {options.exec.timeout(), options.exec.jobs});

  ScoreReport report;
  report.task_kind = run.task_kind;
  report.anchor = anchor;
  report.n_max = n_max;
  for (const auto& metric : metrics) {
    MetricScores scores;
    scores.metric = metric.name();
    for (const auto& forest : forests) {
      std::vector<std::vector<double>> per_tree;
      for (const auto& tree : forest.trees) per_tree.push_back(scorer.tree_profile(tree, n_max, anchor, metric));
      scores.per_tree.push_back(std::move(per_tree));
    }
    finalize_metric_scores(scores, n_max);
    report.metrics.push_back(std::move(scores));
  }

  const fs::path target = options.out.value_or(options.run_dir / "scores.json");
  write_text_atomic(target, dump_document(report.to_json()));
  print_diagnostics(diagnostics, err);
  if (options.json) {
    out << dump_document(report.to_json());
  } else {
    out << report.render_table();
  }
  return kOk;
}

int cmd_correlate(const CorrelateOptions& options, std::ostream& out, std::ostream&) {
  MetricTable table = MetricTable::load_csv(options.table);
  if (options.scores) {
    if (options.model.empty()) throw ConfigError("--scores needs --model to name the table row it replaces");
    const auto report = ScoreReport::from_json(read_json(*options.scores));
    std::vector<std::pair<std::string, double>> values;
    for (const auto& [metric, suffix] : {std::pair{"embedding", "emb"}, std::pair{"bleu", "bleu"}}) {
      const auto found = std::find_if(report.metrics.begin(), report.metrics.end(),
                                      [&](const MetricScores& m) { return m.metric == metric; });
      if (found == report.metrics.end()) continue;
      for (std::size_t n = 0; n < found->stats.size(); ++n) {
        const auto column = "c" + std::to_string(n + 1) + "_" + suffix;
        if (table.has_column(column)) values.emplace_back(column, found->stats[n].mean * 100.0);
      }
    }
    if (values.empty()) throw ConfigError("score report has no column in common with the table");
    table.set_row(options.model, values);
  }
  const auto report = correlate(table);
  std::string text;
  if (options.json) {
    json doc = {{"correlations", report.to_json()}};
    if (options.matrix) doc["matrix"] = correlation_matrix(table).to_json();
    text = dump_document(doc);
  } else {
    text = report.render_table();
    if (options.matrix) text += "\n" + correlation_matrix(table).render_table();
  }
  if (options.out) write_text_atomic(*options.out, text);
  out << text;
  return kOk;
}

int cmd_dump(const DumpOptions& options, std::ostream& out, std::ostream& err) {
  const LoadedRun run = load_run(options.run_dir);
  if (options.run >= run.manifest.runs() || options.tree >= run.manifest.roots()) {
    throw ConfigError("no tree " + std::to_string(options.tree) + " in run " + std::to_string(options.run));
  }
  const auto& rec = run.manifest.record(options.run, options.tree);
  if (rec.status != TreeStatus::done) throw ConfigError("tree " + std::to_string(options.tree) + " is not built");
  const Tree tree = deserialize_tree(read_json(options.run_dir / rec.file));
  const auto metric = SimilarityMetric::parse(options.metric);

  std::unique_ptr<EmbedderStack> embedders;
  if (metric.kind == SimilarityMetric::Kind::embedding_cosine) {
    embedders = std::make_unique<EmbedderStack>(options.embedder, options.exec.jobs);
  }
  const ExecHarness harness({options.exec.worker_command(), options.exec.jobs});
  Diagnostics diagnostics;
  Scorer scorer(harness, embedders ? embedders->cache.get() : nullptr, &diagnostics,
                {options.exec.timeout(), options.exec.jobs});
  const auto similarity = scorer.similarity_to_root(tree, metric);
  print_diagnostics(diagnostics, err);
  out << (options.json ? dump_document(tree_dump_json(tree, similarity)) : render_tree_dump(tree, similarity));
  return kOk;
}

}  // namespace sctree::cli
