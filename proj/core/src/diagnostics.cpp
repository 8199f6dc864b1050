#include "sctree/diagnostics.hpp"

namespace sctree {

void Diagnostics::record(std::string source, std::string message) {
  std::lock_guard lock(mutex_);
  entries_.push_back({std::move(source), std::move(message)});
}

std::vector<Diagnostic> Diagnostics::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t Diagnostics::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace sctree
