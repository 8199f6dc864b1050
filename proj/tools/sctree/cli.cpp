#include "cli.hpp"

#include <CLI11.hpp>

#include "commands.hpp"
#include "sctree/text.hpp"

namespace sctree::cli {

namespace {

void add_role(CLI::App& cmd, const std::string& role, RoleOptions& options) {
  cmd.add_option("--" + role + "-base-url", options.base_url, "OpenAI-compatible endpoint for the " + role);
  cmd.add_option("--" + role + "-model", options.model, "model name for the " + role);
}

void add_exec(CLI::App& cmd, ExecOptions& options, std::string& worker) {
  cmd.add_option("--worker", worker, "execution worker command line (default: sctree-stub-worker)");
  cmd.add_option("--jobs", options.jobs, "parallel requests / worker processes")->check(CLI::PositiveNumber);
  cmd.add_option("--timeout-ms", options.timeout_ms, "per test case timeout")->check(CLI::PositiveNumber);
}

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> argv;
  for (const auto part : text::split_whitespace(command)) argv.emplace_back(part);
  return argv;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-consistency tree evaluation of language models", "sctree"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "sctree 0.1.0");

  std::string worker;

  GenBenchOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-bench", "generate a benchmark file with the evaluator model");
  gen_cmd->add_option("--task", gen.task, "translation | programming")->required();
  gen_cmd->add_option("--out", gen.out, "benchmark YAML to write")->required();
  gen_cmd->add_option("--roots", gen.roots, "number of root nodes M");
  gen_cmd->add_option("--attempts", gen.attempts, "attempts per root")->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--mock-evaluator", gen.mock_evaluator, "offline deterministic evaluator");
  add_role(*gen_cmd, "evaluator", gen.evaluator);
  add_exec(*gen_cmd, gen.exec, worker);

  RunOptions run;
  std::string task;
  auto* run_cmd = app.add_subcommand("run", "build R forests of self-consistency trees");
  run_cmd->add_option("--bench", run.bench, "benchmark YAML")->required();
  run_cmd->add_option("--out", run.out, "run directory")->required();
  run_cmd->add_option("--task", task, "expected task of the benchmark");
  run_cmd->add_option("--depth", run.depth, "tree depth D");
  run_cmd->add_option("--branching", run.branching, "branching factor k (must equal the pair count)");
  run_cmd->add_option("--n-max", run.n_max, "longest path length scored");
  run_cmd->add_option("--roots", run.roots, "trees per forest M");
  run_cmd->add_option("--runs", run.runs, "forest rebuilds R");
  run_cmd->add_option("--mock", run.mock, "identity | drop-last:J | reverse | dropout:RATE:SEED");
  run_cmd->add_option("--temperature", run.temperature);
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_flag("--resume", run.resume, "continue the run recorded in --out");
  add_role(*run_cmd, "evaluatee", run.evaluatee);
  add_exec(*run_cmd, run.exec, worker);

  ScoreOptions score;
  std::string score_out;
  int score_n_max = 0;
  auto* score_cmd = app.add_subcommand("score", "score the forests of a run");
  score_cmd->add_option("--run", score.run_dir, "run directory")->required();
  score_cmd->add_option("--metric", score.metrics, "embedding | bleu | levenshtein (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  score_cmd->add_option("--paths", score.paths, "root | all")->check(CLI::IsMember({"root", "all"}));
  auto* n_max_opt = score_cmd->add_option("--n-max", score_n_max, "longest path length scored");
  score_cmd->add_option("--out", score_out, "score report JSON (default: <run>/scores.json)");
  score_cmd->add_flag("--json", score.json, "print the report as JSON");
  add_role(*score_cmd, "embedder", score.embedder);
  add_exec(*score_cmd, score.exec, worker);

  CorrelateOptions corr;
  std::string corr_scores, corr_out;
  auto* corr_cmd = app.add_subcommand("correlate", "correlate consistency columns with external metrics");
  corr_cmd->add_option("--table", corr.table, "per-model metric CSV")->required();
  corr_cmd->add_option("--scores", corr_scores, "score report whose means replace a model's row");
  corr_cmd->add_option("--model", corr.model, "row replaced by --scores");
  corr_cmd->add_flag("--matrix", corr.matrix, "also print the column-by-column Pearson matrix");
  corr_cmd->add_flag("--json", corr.json, "print JSON");
  corr_cmd->add_option("--out", corr_out, "also write the output here");

  DumpOptions dump;
  auto* dump_cmd = app.add_subcommand("dump", "print one tree with each node's similarity to the root");
  dump_cmd->add_option("--run", dump.run_dir, "run directory")->required();
  dump_cmd->add_option("--run-index", dump.run, "forest rebuild index");
  dump_cmd->add_option("--tree", dump.tree, "tree index");
  dump_cmd->add_option("--metric", dump.metric, "embedding | bleu | levenshtein");
  dump_cmd->add_flag("--json", dump.json, "print JSON");
  add_role(*dump_cmd, "embedder", dump.embedder);
  add_exec(*dump_cmd, dump.exec, worker);

  std::vector<std::string> argv_storage{"sctree"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen_cmd) {
      gen.exec.worker = split_command(worker);
      return cmd_gen_bench(gen, out, err);
    }
    if (*run_cmd) {
      run.exec.worker = split_command(worker);
      if (!task.empty()) run.task = task;
      return cmd_run(run, out, err);
    }
    if (*score_cmd) {
      score.exec.worker = split_command(worker);
      if (*n_max_opt) score.n_max = score_n_max;
      if (!score_out.empty()) score.out = score_out;
      return cmd_score(score, out, err);
    }
    if (*corr_cmd) {
      if (!corr_scores.empty()) corr.scores = corr_scores;
      if (!corr_out.empty()) corr.out = corr_out;
      return cmd_correlate(corr, out, err);
    }
    dump.exec.worker = split_command(worker);
    return cmd_dump(dump, out, err);
  } catch (const PartialFailure& e) {
    err << "error: " << e.what() << "\n";
    return kPartialFailure;
  } catch (const BenchmarkGenerationError& e) {
    err << "error: " << e.what() << "\n";
    return kPartialFailure;
  } catch (const GatewayError& e) {
    err << "error: " << e.what() << "\n";
    return kGatewayFailure;
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << "\n";
    return kGatewayFailure;
  } catch (const HarnessError& e) {
    err << "error: " << e.what() << "\n";
    return kGatewayFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace sctree::cli
