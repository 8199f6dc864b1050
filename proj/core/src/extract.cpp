#include "sctree/extract.hpp"

#include <vector>

#include "sctree/text.hpp"

namespace sctree {
namespace {

std::vector<std::string_view> lines_of(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string_view ltrim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

bool is_fence(std::string_view line) {
  const auto t = ltrim(line);
  return t.starts_with("```") || t.starts_with("~~~");
}

std::string join_lines(const std::vector<std::string_view>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<std::string> fenced_blocks(const std::vector<std::string_view>& lines) {
  std::vector<std::string> blocks;
  std::vector<std::string_view> current;
  bool inside = false;
  for (const auto line : lines) {
    if (is_fence(line)) {
      if (inside) blocks.push_back(join_lines(current));
      current.clear();
      inside = !inside;
      continue;
    }
    if (inside) current.push_back(line);
  }
  if (inside) blocks.push_back(join_lines(current));  // unterminated fence runs to the end
  return blocks;
}

std::string without_fence_lines(const std::vector<std::string_view>& lines) {
  std::vector<std::string_view> kept;
  for (const auto line : lines) {
    if (!is_fence(line)) kept.push_back(line);
  }
  return join_lines(kept);
}

}  // namespace

bool defines_main(std::string_view code) {
  for (auto line : lines_of(code)) {
    line = ltrim(line);
    if (!line.starts_with("def")) continue;
    line.remove_prefix(3);
    if (line.empty() || (line.front() != ' ' && line.front() != '\t')) continue;
    line = ltrim(line);
    if (!line.starts_with("main")) continue;
    line.remove_prefix(4);
    line = ltrim(line);
    if (line.starts_with("(")) return true;
  }
  return false;
}

std::optional<std::string> extract_content(std::string_view raw, TaskKind kind) {
  const auto lines = lines_of(raw);
  const auto blocks = fenced_blocks(lines);
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (defines_main(*it)) {
      const auto body = text::trim(*it);
      return std::string(body);
    }
  }
  if (kind == TaskKind::programming && !defines_main(raw)) return std::nullopt;
  const auto stripped = without_fence_lines(lines);
  const auto body = text::trim(stripped);
  if (body.empty()) return std::nullopt;
  return std::string(body);
}

}  // namespace sctree
