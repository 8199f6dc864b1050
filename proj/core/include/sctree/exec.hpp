#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sctree/types.hpp"

namespace sctree {

inline constexpr std::chrono::milliseconds kDefaultCaseTimeout{2000};
inline constexpr std::string_view kErrorToken = "<error>";
inline constexpr std::string_view kTimeoutToken = "<timeout>";

enum class CaseStatus { ok, error, timeout };

std::string_view to_string(CaseStatus status);

struct ExecCase {
  nlohmann::json args = nlohmann::json::array();
  std::chrono::milliseconds timeout = kDefaultCaseTimeout;
};

std::vector<ExecCase> make_cases(const TestInputs& inputs,
                                 std::chrono::milliseconds timeout = kDefaultCaseTimeout);

struct CaseOutcome {
  CaseStatus status = CaseStatus::error;
  // Canonical rendering of the returned value, or "<error>" / "<timeout>".
  std::string rendered;
  // Worker-reported error text or harness note; never part of the transcript.
  std::string detail;
};

struct ExecTranscript {
  std::vector<CaseOutcome> per_case;

  // Rendered fields joined by '\n' in input order.
  std::string concatenated() const;
};

// Canonical text for one returned value: integers and reals in shortest round-trip form (reals
// always carry a '.', 'e', "inf" or "nan"), top-level strings verbatim, nested strings quoted,
// arrays as "[a, b]" and objects as "{"k": v}" with keys sorted. nullopt for binary values.
std::optional<std::string> render_value(const nlohmann::json& value);

struct HarnessConfig {
  // argv of the worker process; empty means no worker available (only bare translation
  // paragraphs can be "executed").
  std::vector<std::string> worker_command;
  // Cases of one node run concurrently up to this many worker processes.
  std::size_t pool_size = 1;
};

// Executes node content over shared inputs, one isolated worker process per case.
//
// Wire protocol: the harness writes one JSON line {"code", "args", "case_id"} to the worker's
// stdin and expects exactly one JSON line {"case_id", "status": "ok"|"error", "value"|"error"}
// on stdout. Non-zero exit, no line, extra lines or unparseable JSON make the case an error;
// exceeding the timeout kills the worker's process group and makes the case a timeout. A
// well-formed response with a foreign case_id or unknown status throws HarnessError.
class ExecHarness {
 public:
  explicit ExecHarness(HarnessConfig config = {});

  // translation: one record. Content defining main is run with no arguments; any other content
  // is its own output. programming: one record per case. Sentinel content renders every record
  // as "<error>" without spawning a worker.
  ExecTranscript execute(std::string_view content, std::span<const ExecCase> cases,
                         TaskKind kind) const;

  CaseOutcome run_case(std::string_view code, const nlohmann::json& args, std::string_view case_id,
                       std::chrono::milliseconds timeout) const;

  const HarnessConfig& config() const noexcept { return config_; }

 private:
  HarnessConfig config_;
};

}  // namespace sctree
