#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace sctree {

struct Diagnostic {
  std::string source;
  std::string message;
};

// Thread-safe sink for non-fatal problems (unparseable responses, metric failures) that are
// absorbed into sentinel nodes or zero scores instead of aborting a run.
class Diagnostics {
 public:
  void record(std::string source, std::string message);
  std::vector<Diagnostic> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Diagnostic> entries_;
};

}  // namespace sctree
