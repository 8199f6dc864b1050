#include "sctree/gateway.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sctree/errors.hpp"
#include "sctree/text.hpp"

namespace sctree {

using nlohmann::json;

void GatewayConfig::validate() const {
  if (!base_url.starts_with("http://") && !base_url.starts_with("https://")) {
    throw ConfigError("gateway base_url must start with http:// or https:// (got '" + base_url + "')");
  }
  if (model_name.empty()) throw ConfigError("gateway model name is empty");
  if (!(temperature >= 0.0)) throw ConfigError("gateway temperature must be >= 0");
  if (max_parallel < 1) throw ConfigError("gateway max_parallel must be >= 1");
  if (max_retries < 0) throw ConfigError("gateway max_retries must be >= 0");
  if (request_timeout.count() <= 0) throw ConfigError("gateway request timeout must be positive");
  if (backoff_initial.count() < 0 || backoff_max < backoff_initial) {
    throw ConfigError("gateway backoff must satisfy 0 <= initial <= max");
  }
}

std::string GatewayConfig::api_key_from_env() {
  const char* value = std::getenv(kApiKeyEnv);
  return value ? std::string(value) : std::string();
}

std::vector<std::chrono::milliseconds> retry_schedule(const GatewayConfig& config) {
  std::vector<std::chrono::milliseconds> delays;
  auto delay = config.backoff_initial;
  for (int i = 0; i < config.max_retries; ++i) {
    delays.push_back(std::min(delay, config.backoff_max));
    if (delay < config.backoff_max) delay *= 2;
  }
  return delays;
}

bool EmbeddingVector::is_zero() const noexcept {
  for (const double v : values) {
    if (v != 0.0) return false;
  }
  return true;
}

struct HttpGateway::Impl {
  explicit Impl(GatewayConfig c)
      : config(std::move(c)), slots(static_cast<std::ptrdiff_t>(config.max_parallel)), delays(retry_schedule(config)) {
    const auto scheme_end = config.base_url.find("://");
    const auto path_start = config.base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      origin = config.base_url;
    } else {
      origin = config.base_url.substr(0, path_start);
      prefix = config.base_url.substr(path_start);
    }
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    send_seed = config.send_seed;
  }

  // POSTs `body` with retries; returns the parsed JSON response body.
  json post(const std::string& endpoint, const std::function<json(bool)>& make_body) {
    int last_status = -1;
    std::string last_error;
    const int attempts = config.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      httplib::Result result{nullptr, httplib::Error::Unknown};
      {
        slots.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{slots};
        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.request_timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.request_timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        httplib::Headers headers;
        if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);
        result = client.Post(prefix + endpoint, headers, make_body(send_seed.load()).dump(), "application/json");
      }

      bool retryable = true;
      if (!result) {
        last_status = -1;
        last_error = httplib::to_string(result.error());
      } else {
        const int status = result->status;
        if (status >= 200 && status < 300) {
          try {
            return json::parse(result->body);
          } catch (const json::exception& e) {
            throw ProtocolError(endpoint + ": response body is not JSON: " + e.what());
          }
        }
        last_status = status;
        last_error = "HTTP " + std::to_string(status);
        if (status == 400 && send_seed.load() && result->body.find("seed") != std::string::npos) {
          // Endpoint rejects the seed parameter: drop it for the rest of this gateway's life.
          send_seed = false;
          --attempt;
          continue;
        }
        retryable = status == 429 || status >= 500;
      }
      if (!retryable) throw GatewayError(endpoint + " failed: " + last_error, last_status);
      if (attempt + 1 < attempts) std::this_thread::sleep_for(delays[static_cast<std::size_t>(attempt)]);
    }
    throw GatewayError(endpoint + " failed after " + std::to_string(attempts) + " attempts: " + last_error,
                       last_status);
  }

  GatewayConfig config;
  std::counting_semaphore<> slots;
  std::vector<std::chrono::milliseconds> delays;
  std::string origin;
  std::string prefix;
  std::atomic<bool> send_seed{true};
  std::atomic<std::size_t> embedding_dim{0};
};

HttpGateway::HttpGateway(GatewayConfig config) {
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config));
}

HttpGateway::~HttpGateway() = default;

const GatewayConfig& HttpGateway::config() const noexcept { return impl_->config; }

std::string HttpGateway::chat(std::string_view system_text, std::string_view user_text) {
  const auto& config = impl_->config;
  const auto body = [&](bool with_seed) {
    json request = {{"model", config.model_name},
                    {"messages",
                     json::array({{{"role", "system"}, {"content", system_text}},
                                  {{"role", "user"}, {"content", user_text}}})},
                    {"temperature", config.temperature}};
    if (with_seed) request["seed"] = config.seed;
    return request;
  };
  const json response = impl_->post("/chat/completions", body);
  const auto choices = response.find("choices");
  if (choices == response.end() || !choices->is_array() || choices->empty()) {
    throw ProtocolError("/chat/completions: response has no choices");
  }
  const auto& first = choices->front();
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw ProtocolError("/chat/completions: first choice has no message");
  }
  const auto& message = first["message"];
  const auto content = message.find("content");
  if (content == message.end() || !content->is_string()) {
    throw ProtocolError("/chat/completions: message content is not a string");
  }
  return content->get<std::string>();
}

EmbeddingVector HttpGateway::embed(std::string_view text) {
  if (text.empty()) return EmbeddingVector::zero(impl_->embedding_dim.load());
  const auto& config = impl_->config;
  const auto body = [&](bool) { return json{{"model", config.model_name}, {"input", text}}; };
  const json response = impl_->post("/embeddings", body);
  const auto data = response.find("data");
  if (data == response.end() || !data->is_array() || data->empty() || !data->front().is_object()) {
    throw ProtocolError("/embeddings: response has no data");
  }
  const auto embedding = data->front().find("embedding");
  if (embedding == data->front().end() || !embedding->is_array() || embedding->empty()) {
    throw ProtocolError("/embeddings: first item has no embedding");
  }
  EmbeddingVector vector;
  vector.values.reserve(embedding->size());
  for (const auto& v : *embedding) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ProtocolError("/embeddings: non-finite entry");
    vector.values.push_back(v.get<double>());
  }
  std::size_t expected = 0;
  if (!impl_->embedding_dim.compare_exchange_strong(expected, vector.dim()) && expected != vector.dim()) {
    throw ProtocolError("/embeddings: dimension changed from " + std::to_string(expected) + " to " +
                        std::to_string(vector.dim()));
  }
  return vector;
}

EmbeddingVector HashedEmbedder::embed(std::string_view text) {
  auto vector = EmbeddingVector::zero(kDim);
  for (const auto token : text::split_whitespace(text)) {
    vector.values[text::fnv1a64(token) % kDim] += 1.0;
  }
  double norm = 0.0;
  for (const double v : vector.values) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : vector.values) v /= norm;
  }
  return vector;
}

EmbeddingVector CachingEmbedder::embed(std::string_view text) {
  const std::string key(text);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto vector = inner_.embed(text);
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(vector)).first->second;
}

std::size_t CachingEmbedder::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace sctree
