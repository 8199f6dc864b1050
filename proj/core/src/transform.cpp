#include "sctree/transform.hpp"

#include <charconv>
#include <random>

#include "sctree/diagnostics.hpp"
#include "sctree/errors.hpp"
#include "sctree/extract.hpp"
#include "sctree/gateway.hpp"
#include "sctree/text.hpp"

namespace sctree {

std::string Transformer::apply_pair(std::string_view content, const OperationPair& pair) const {
  if (is_sentinel(content)) return std::string(kSentinelContent);
  try {
    return transform(content, pair);
  } catch (const std::exception&) {
    return std::string(kSentinelContent);
  }
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Alternating runs of whitespace and non-whitespace, in order.
std::vector<std::string_view> segments(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool space = is_space(s[i]);
    const std::size_t start = i;
    while (i < s.size() && is_space(s[i]) == space) ++i;
    out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string drop_last_words(std::string_view content, std::size_t count) {
  const auto tokens = text::split_whitespace(content);
  if (tokens.size() <= count) return {};
  const auto& keep_last = tokens[tokens.size() - count - 1];
  const auto end = static_cast<std::size_t>(keep_last.data() - content.data()) + keep_last.size();
  return std::string(content.substr(0, end));
}

std::string reverse_words(std::string_view content) {
  auto parts = segments(content);
  std::string out;
  out.reserve(content.size());
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += *it;
  return out;
}

std::string word_dropout(std::string_view content, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ text::fnv1a64(content));
  std::vector<std::string_view> kept;
  for (const auto token : text::split_whitespace(content)) {
    // Top 53 bits -> uniform double in [0, 1); independent of the standard library's distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u >= rate) kept.push_back(token);
  }
  return text::join(kept, " ");
}

std::size_t parse_size(std::string_view s, std::string_view spec) {
  std::size_t value = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), value);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("bad mock channel '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

MockChannel MockChannel::parse(std::string_view spec) {
  if (spec == "identity") return identity();
  if (spec == "reverse") return reverse_words();
  if (spec.starts_with("drop-last")) {
    if (spec == "drop-last") return drop_last_words(1);
    if (spec[9] != ':') throw ConfigError("bad mock channel '" + std::string(spec) + "'");
    return drop_last_words(parse_size(spec.substr(10), spec));
  }
  if (spec.starts_with("dropout:")) {
    const auto rest = spec.substr(8);
    const auto colon = rest.find(':');
    const auto rate_text = std::string(rest.substr(0, colon));
    double rate = 0.0;
    try {
      std::size_t used = 0;
      rate = std::stod(rate_text, &used);
      if (used != rate_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("bad dropout rate in mock channel '" + std::string(spec) + "'");
    }
    if (rate < 0.0 || rate > 1.0) throw ConfigError("dropout rate must be in [0, 1]");
    const std::uint64_t seed = colon == std::string_view::npos ? 0 : parse_size(rest.substr(colon + 1), spec);
    return seeded_word_dropout(rate, seed);
  }
  throw ConfigError("unknown mock channel '" + std::string(spec) +
                    "' (expected identity|drop-last:J|reverse|dropout:RATE:SEED)");
}

std::string MockChannel::to_string() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::drop_last_words: return "drop-last:" + std::to_string(drop_count);
    case Kind::reverse_words: return "reverse";
    case Kind::seeded_word_dropout: return "dropout:" + text::shortest_double(dropout_rate) + ":" + std::to_string(seed);
  }
  return "identity";
}

std::string apply_mock_channel(std::string_view content, const MockChannel& channel) {
  switch (channel.kind) {
    case MockChannel::Kind::identity: return std::string(content);
    case MockChannel::Kind::drop_last_words: return drop_last_words(content, channel.drop_count);
    case MockChannel::Kind::reverse_words: return reverse_words(content);
    case MockChannel::Kind::seeded_word_dropout: return word_dropout(content, channel.dropout_rate, channel.seed);
  }
  return std::string(content);
}

std::string MockTransformer::transform(std::string_view content, const OperationPair&) const {
  return apply_mock_channel(content, channel_);
}

namespace {

std::string substitute(std::string_view pattern, std::string_view prompt, std::string_view content) {
  std::string out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern.substr(i).starts_with("{prompt}")) {
      out += prompt;
      i += 8;
    } else if (pattern.substr(i).starts_with("{content}")) {
      out += content;
      i += 9;
    } else {
      out += pattern[i++];
    }
  }
  return out;
}

}  // namespace

std::string PromptTemplate::render_system(std::string_view prompt, std::string_view content) const {
  return substitute(system, prompt, content);
}

std::string PromptTemplate::render_user(std::string_view prompt, std::string_view content) const {
  return substitute(user, prompt, content);
}

LlmTransformer::LlmTransformer(ChatClient& chat, TaskKind task_kind, PromptTemplate prompt_template,
                               Diagnostics* diagnostics)
    : chat_(chat), task_kind_(task_kind), template_(std::move(prompt_template)), diagnostics_(diagnostics) {}

std::string LlmTransformer::transform(std::string_view content, const OperationPair& pair) const {
  const auto step = [&](std::string_view prompt, std::string_view input, const char* which) -> std::optional<std::string> {
    std::string raw;
    try {
      raw = chat_.chat(template_.render_system(prompt, input), template_.render_user(prompt, input));
    } catch (const Error& e) {
      if (diagnostics_) diagnostics_->record("transform", pair.label + " " + which + ": " + e.what());
      return std::nullopt;
    }
    auto extracted = extract_content(raw, task_kind_);
    if (!extracted && diagnostics_) {
      diagnostics_->record("transform", pair.label + " " + which + ": no usable content in response");
    }
    return extracted;
  };

  const auto forward = step(pair.forward_prompt, content, "forward");
  if (!forward) return std::string(kSentinelContent);
  const auto inverse = step(pair.inverse_prompt, *forward, "inverse");
  if (!inverse) return std::string(kSentinelContent);
  return *inverse;
}

}  // namespace sctree
