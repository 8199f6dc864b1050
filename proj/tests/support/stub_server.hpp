#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

// OpenAI-compatible endpoint on 127.0.0.1 for gateway tests. Handlers see the parsed request body
// and return (status, body).
class StubServer {
 public:
  struct Reply {
    int status = 200;
    std::string body;
  };
  using Handler = std::function<Reply(const nlohmann::json& request)>;

  StubServer();
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  void on_chat(Handler handler);
  void on_embeddings(Handler handler);

  std::string base_url() const;  // http://127.0.0.1:<port>/v1

  std::vector<nlohmann::json> chat_requests() const;
  std::vector<std::string> authorization_headers() const;
  std::size_t embedding_calls() const;

  static Reply chat_reply(const std::string& content);
  static Reply embedding_reply(const std::vector<double>& values);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};
