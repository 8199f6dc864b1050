#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sctree/errors.hpp"
#include "sctree/gateway.hpp"
#include "sctree/scoring.hpp"
#include "sctree/tree.hpp"
#include "sctree/types.hpp"

namespace sctree::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2, kGatewayFailure = 3 };

// Some trees failed; the rest of the run was written.
class PartialFailure : public Error {
 public:
  using Error::Error;
};

struct RoleOptions {
  std::string base_url;
  std::string model;

  bool configured() const { return !base_url.empty() || !model.empty(); }
  GatewayConfig gateway(const std::string& role, std::size_t jobs) const;
};

struct ExecOptions {
  std::vector<std::string> worker;  // empty: SCTREE_WORKER, then sctree-stub-worker next to the binary
  std::size_t jobs = 4;
  int timeout_ms = 2000;

  std::vector<std::string> worker_command() const;
  std::chrono::milliseconds timeout() const { return std::chrono::milliseconds(timeout_ms); }
};

struct RunConfig {
  TaskKind task_kind = TaskKind::translation;
  std::filesystem::path benchmark;
  std::string benchmark_fingerprint;
  std::string mock;  // mock channel spec; empty means the evaluatee gateway
  RoleOptions evaluatee;
  double temperature = 0.6;
  std::int64_t seed = 42;
  int depth = 3;
  std::size_t branching = 3;
  int n_max = 3;
  std::size_t roots = 10;
  std::size_t runs = 3;
  int timeout_ms = 2000;

  // n_max <= D, k equals the benchmark's pair count, M within the benchmark, R >= 1.
  void validate(std::size_t benchmark_pairs, std::size_t benchmark_roots) const;
  nlohmann::json to_json() const;
};

struct GenBenchOptions {
  std::string task;
  std::filesystem::path out;
  std::size_t roots = 10;
  RoleOptions evaluator;
  bool mock_evaluator = false;
  int attempts = 3;
  ExecOptions exec;
};

struct RunOptions {
  std::filesystem::path bench;
  std::filesystem::path out;
  std::optional<std::string> task;
  int depth = 3;
  std::optional<std::size_t> branching;
  int n_max = 3;
  std::size_t roots = 10;
  std::size_t runs = 3;
  std::string mock;
  RoleOptions evaluatee;
  double temperature = 0.6;
  std::int64_t seed = 42;
  bool resume = false;
  ExecOptions exec;
};

struct ScoreOptions {
  std::filesystem::path run_dir;
  std::vector<std::string> metrics;
  std::string paths = "root";
  std::optional<int> n_max;
  RoleOptions embedder;
  std::optional<std::filesystem::path> out;
  bool json = false;
  ExecOptions exec;
};

struct CorrelateOptions {
  std::filesystem::path table;
  std::optional<std::filesystem::path> scores;
  std::string model;
  bool matrix = false;
  bool json = false;
  std::optional<std::filesystem::path> out;
};

struct DumpOptions {
  std::filesystem::path run_dir;
  std::size_t run = 0;
  std::size_t tree = 0;
  std::string metric = "bleu";
  bool json = false;
  RoleOptions embedder;
  ExecOptions exec;
};

int cmd_gen_bench(const GenBenchOptions& options, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreOptions& options, std::ostream& out, std::ostream& err);
int cmd_correlate(const CorrelateOptions& options, std::ostream& out, std::ostream& err);
int cmd_dump(const DumpOptions& options, std::ostream& out, std::ostream& err);

}  // namespace sctree::cli
