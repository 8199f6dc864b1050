#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sctree {

inline constexpr const char* kApiKeyEnv = "CC_API_KEY";

struct GatewayConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8000/v1"; requests go to {base_url}/chat/completions
  std::string model_name;
  double temperature = 0.6;
  std::int64_t seed = 42;
  bool send_seed = true;
  int max_retries = 3;
  std::chrono::milliseconds request_timeout{std::chrono::seconds(120)};
  std::size_t max_parallel = 4;
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds backoff_max{std::chrono::seconds(16)};
  std::string api_key;

  // Throws ConfigError.
  void validate() const;
  // Value of CC_API_KEY, or empty.
  static std::string api_key_from_env();
};

// Delay before retry i (i = 0 .. max_retries-1): backoff_initial * 2^i capped at backoff_max.
std::vector<std::chrono::milliseconds> retry_schedule(const GatewayConfig& config);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the first choice's message text. Implementations must be thread-safe.
  virtual std::string chat(std::string_view system_text, std::string_view user_text) = 0;
};

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool is_zero() const noexcept;
  static EmbeddingVector zero(std::size_t dim) { return {std::vector<double>(dim, 0.0)}; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  // Empty text maps to a zero vector without contacting any backend. Thread-safe.
  virtual EmbeddingVector embed(std::string_view text) = 0;
};

// OpenAI-compatible client for POST {base_url}/chat/completions and {base_url}/embeddings.
// At most config.max_parallel requests are in flight across all threads; 429, 5xx and transport
// failures are retried on retry_schedule(config).
class HttpGateway final : public ChatClient, public EmbeddingClient {
 public:
  explicit HttpGateway(GatewayConfig config);
  ~HttpGateway() override;

  HttpGateway(const HttpGateway&) = delete;
  HttpGateway& operator=(const HttpGateway&) = delete;

  std::string chat(std::string_view system_text, std::string_view user_text) override;
  EmbeddingVector embed(std::string_view text) override;

  const GatewayConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Offline embedding backend: 256-dim hashed bag of whitespace tokens, L2-normalised.
class HashedEmbedder final : public EmbeddingClient {
 public:
  static constexpr std::size_t kDim = 256;
  EmbeddingVector embed(std::string_view text) override;
};

// Memoises another backend per content string.
class CachingEmbedder final : public EmbeddingClient {
 public:
  explicit CachingEmbedder(EmbeddingClient& inner) : inner_(inner) {}
  EmbeddingVector embed(std::string_view text) override;
  std::size_t cache_size() const;

 private:
  EmbeddingClient& inner_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace sctree
