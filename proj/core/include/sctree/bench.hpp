#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sctree/tree.hpp"
#include "sctree/types.hpp"

namespace sctree {

class ChatClient;
class Diagnostics;
class ExecHarness;

inline constexpr std::size_t kProgrammingInputCount = 20;
inline constexpr int kMaxRootAttempts = 3;

struct MetaPrompt {
  TaskKind task_kind = TaskKind::translation;
  std::string text;

  static MetaPrompt default_for(TaskKind kind);
};

struct RootSpec {
  std::string problem;  // programming only
  std::string content;  // function source whose main returns the payload / solves the problem
  TestInputs inputs;    // empty for translation, exactly 20 for programming

  friend bool operator==(const RootSpec&, const RootSpec&) = default;
};

struct BenchmarkFile {
  TaskKind task_kind = TaskKind::translation;
  std::string evaluator_model;
  std::vector<OperationPair> pairs;
  std::vector<RootSpec> roots;

  // Throws ParseError naming the field path of the first violation.
  void validate() const;

  friend bool operator==(const BenchmarkFile&, const BenchmarkFile&) = default;
};

std::string benchmark_to_yaml(const BenchmarkFile& file);
// Schema-validated. Throws ParseError with a field path.
BenchmarkFile benchmark_from_yaml(std::string_view text);

// Writes to a sibling temporary file and renames it into place.
void save_benchmark(const BenchmarkFile& file, const std::filesystem::path& path);
BenchmarkFile load_benchmark(const std::filesystem::path& path);

// Runs every input of every programming root through the harness; returns one message per
// failing case (empty when all pass). Translation roots defining main must run successfully.
std::vector<std::string> smoke_check(const BenchmarkFile& file, const ExecHarness& harness,
                                     std::chrono::milliseconds timeout);

std::string language_name(std::string_view code);

// Round trip through `target` and back to `source`, labelled "en→fr→en".
OperationPair translation_pair(std::string_view source, std::string_view target);

// translation: en↔fr, en↔es, en↔de. programming: iterative↔recursive, add↔remove logging,
// helper extraction↔inlining.
std::vector<OperationPair> default_operation_pairs(TaskKind kind);

// Asks the evaluator for three target languages; falls back to the defaults (with a diagnostic)
// when the gateway fails or the answer does not parse. Programming always uses the defaults.
std::vector<OperationPair> propose_operation_pairs(TaskKind kind, ChatClient& evaluator,
                                                   Diagnostics* diagnostics = nullptr);

struct GenerationOptions {
  std::size_t root_count = 10;
  std::size_t max_parallel = 1;
  int max_attempts = kMaxRootAttempts;
  std::chrono::milliseconds case_timeout{2000};
};

// Generates distinct, smoke-passing roots. Roots are requested concurrently per round; a root
// that fails parsing, smoke execution or distinctness is regenerated, up to max_attempts.
// Throws BenchmarkGenerationError listing every root that never succeeded.
std::vector<RootSpec> generate_roots(const MetaPrompt& meta, ChatClient& evaluator,
                                     const ExecHarness& harness, const GenerationOptions& options,
                                     Diagnostics* diagnostics = nullptr);

// Parses one evaluator reply (YAML mapping, optionally fenced) into a root. Throws ParseError.
RootSpec parse_root_reply(std::string_view reply, TaskKind kind);

}  // namespace sctree
