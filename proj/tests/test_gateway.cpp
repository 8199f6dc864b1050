#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "sctree/errors.hpp"
#include "sctree/gateway.hpp"
#include "stub_server.hpp"

using namespace sctree;
using namespace std::chrono_literals;

namespace {

GatewayConfig config_for(const StubServer& server) {
  GatewayConfig c;
  c.base_url = server.base_url();
  c.model_name = "test-model";
  c.backoff_initial = 1ms;
  c.backoff_max = 4ms;
  c.request_timeout = 5s;
  return c;
}

}  // namespace

TEST(GatewayConfig, Validation) {
  GatewayConfig c;
  c.base_url = "http://localhost:1/v1";
  c.model_name = "m";
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.base_url = "localhost:1";
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.model_name.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.temperature = -0.1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.max_parallel = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.max_retries = -1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.backoff_initial = 20s;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(HttpGateway{bad}, ConfigError);
}

TEST(GatewayConfig, RetrySchedule) {
  GatewayConfig c;
  c.max_retries = 6;
  c.backoff_initial = 500ms;
  c.backoff_max = 4s;
  const std::vector<std::chrono::milliseconds> want = {500ms, 1000ms, 2000ms, 4000ms, 4000ms, 4000ms};
  EXPECT_EQ(retry_schedule(c), want);
  c.max_retries = 0;
  EXPECT_TRUE(retry_schedule(c).empty());
}

TEST(GatewayConfig, ApiKeyFromEnv) {
  ::setenv(kApiKeyEnv, "sk-test", 1);
  EXPECT_EQ(GatewayConfig::api_key_from_env(), "sk-test");
  ::unsetenv(kApiKeyEnv);
  EXPECT_EQ(GatewayConfig::api_key_from_env(), "");
}

TEST(HttpGateway, ChatRequestShapeAndReply) {
  StubServer server;
  server.on_chat([](const nlohmann::json&) { return StubServer::chat_reply("bonjour"); });
  auto c = config_for(server);
  c.api_key = "sk-abc";
  c.temperature = 0.6;
  c.seed = 42;
  HttpGateway gw(c);
  EXPECT_EQ(gw.chat("Translate to French.", "hello"), "bonjour");
  const auto requests = server.chat_requests();
  ASSERT_EQ(requests.size(), 1u);
  const auto& r = requests[0];
  EXPECT_EQ(r["model"], "test-model");
  EXPECT_DOUBLE_EQ(r["temperature"].get<double>(), 0.6);
  EXPECT_EQ(r["seed"], 42);
  ASSERT_EQ(r["messages"].size(), 2u);
  EXPECT_EQ(r["messages"][0]["role"], "system");
  EXPECT_EQ(r["messages"][0]["content"], "Translate to French.");
  EXPECT_EQ(r["messages"][1]["role"], "user");
  EXPECT_EQ(r["messages"][1]["content"], "hello");
  EXPECT_EQ(server.authorization_headers()[0], "Bearer sk-abc");
}

TEST(HttpGateway, NoAuthHeaderWithoutKey) {
  StubServer server;
  server.on_chat([](const nlohmann::json&) { return StubServer::chat_reply("x"); });
  HttpGateway gw(config_for(server));
  gw.chat("s", "u");
  EXPECT_EQ(server.authorization_headers()[0], "");
}

TEST(HttpGateway, SeedOmittedWhenDisabled) {
  StubServer server;
  server.on_chat([](const nlohmann::json&) { return StubServer::chat_reply("x"); });
  auto c = config_for(server);
  c.send_seed = false;
  HttpGateway gw(c);
  gw.chat("s", "u");
  EXPECT_FALSE(server.chat_requests()[0].contains("seed"));
}

TEST(HttpGateway, RetriesTransientFailures) {
  StubServer server;
  std::atomic<int> n{0};
  server.on_chat([&](const nlohmann::json&) -> StubServer::Reply {
    const int i = n++;
    if (i == 0) return {503, "{}"};
    if (i == 1) return {429, "{}"};
    return StubServer::chat_reply("finally");
  });
  auto c = config_for(server);
  c.max_retries = 3;
  HttpGateway gw(c);
  EXPECT_EQ(gw.chat("s", "u"), "finally");
  EXPECT_EQ(n.load(), 3);
}

TEST(HttpGateway, GivesUpAfterRetries) {
  StubServer server;
  server.on_chat([](const nlohmann::json&) -> StubServer::Reply { return {500, "{}"}; });
  auto c = config_for(server);
  c.max_retries = 2;
  HttpGateway gw(c);
  try {
    gw.chat("s", "u");
    FAIL() << "expected GatewayError";
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.last_status(), 500);
  }
  EXPECT_EQ(server.chat_requests().size(), 3u);
}

TEST(HttpGateway, ClientErrorIsNotRetried) {
  StubServer server;
  server.on_chat([](const nlohmann::json&) -> StubServer::Reply { return {401, R"({"error":"bad key"})"}; });
  auto c = config_for(server);
  c.max_retries = 3;
  HttpGateway gw(c);
  try {
    gw.chat("s", "u");
    FAIL() << "expected GatewayError";
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.last_status(), 401);
  }
  EXPECT_EQ(server.chat_requests().size(), 1u);
}

TEST(HttpGateway, SeedRejectionDisablesSeed) {
  StubServer server;
  server.on_chat([](const nlohmann::json& req) -> StubServer::Reply {
    if (req.contains("seed")) return {400, R"({"error":"unsupported parameter: seed"})"};
    return StubServer::chat_reply("ok");
  });
  auto c = config_for(server);
  c.max_retries = 0;
  HttpGateway gw(c);
  EXPECT_EQ(gw.chat("s", "u"), "ok");
  EXPECT_EQ(gw.chat("s", "u"), "ok");
  const auto requests = server.chat_requests();
  ASSERT_EQ(requests.size(), 3u);
  EXPECT_TRUE(requests[0].contains("seed"));
  EXPECT_FALSE(requests[1].contains("seed"));
  EXPECT_FALSE(requests[2].contains("seed"));
}

TEST(HttpGateway, TransportFailure) {
  int port = 0;
  {
    StubServer probe;
    const auto url = probe.base_url();
    port = std::stoi(url.substr(url.rfind(':') + 1));
  }
  GatewayConfig c;
  c.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  c.model_name = "m";
  c.max_retries = 1;
  c.backoff_initial = 1ms;
  c.request_timeout = 2s;
  HttpGateway gw(c);
  try {
    gw.chat("s", "u");
    FAIL() << "expected GatewayError";
  } catch (const GatewayError& e) {
    EXPECT_EQ(e.last_status(), -1);
  }
}

TEST(HttpGateway, MalformedBodiesAreProtocolErrors) {
  StubServer server;
  std::atomic<int> n{0};
  server.on_chat([&](const nlohmann::json&) -> StubServer::Reply {
    switch (n++) {
      case 0: return {200, "not json"};
      case 1: return {200, R"({"choices":[]})"};
      case 2: return {200, R"({"choices":[{"index":0}]})"};
      default: return {200, R"({"choices":[{"message":{"role":"assistant","content":null}}]})"};
    }
  });
  HttpGateway gw(config_for(server));
  for (int i = 0; i < 4; ++i) EXPECT_THROW(gw.chat("s", "u"), ProtocolError) << i;
}

TEST(HttpGateway, ConcurrencyIsBounded) {
  StubServer server;
  std::atomic<int> in_flight{0}, peak{0};
  server.on_chat([&](const nlohmann::json&) {
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(30ms);
    --in_flight;
    return StubServer::chat_reply("x");
  });
  auto c = config_for(server);
  c.max_parallel = 2;
  HttpGateway gw(c);
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { gw.chat("s", "u"); });
  threads.clear();
  EXPECT_LE(peak.load(), 2);
  EXPECT_EQ(server.chat_requests().size(), 8u);
}

TEST(HttpGateway, Embeddings) {
  StubServer server;
  server.on_embeddings([](const nlohmann::json& req) {
    EXPECT_EQ(req["model"], "test-model");
    const auto text = req["input"].get<std::string>();
    if (text == "grow") return StubServer::embedding_reply({1.0, 2.0, 3.0, 4.0});
    if (text == "nan") return StubServer::Reply{200, R"({"data":[{"embedding":[1.0,"x",0.0]}]})"};
    if (text == "none") return StubServer::Reply{200, R"({"data":[]})"};
    return StubServer::embedding_reply({1.0, 0.0, static_cast<double>(text.size())});
  });
  HttpGateway gw(config_for(server));
  EXPECT_EQ(gw.embed("abcd"), (EmbeddingVector{{1.0, 0.0, 4.0}}));
  EXPECT_EQ(server.embedding_calls(), 1u);
  const auto empty = gw.embed("");
  EXPECT_TRUE(empty.is_zero());
  EXPECT_EQ(empty.dim(), 3u);
  EXPECT_EQ(server.embedding_calls(), 1u);
  EXPECT_THROW(gw.embed("grow"), ProtocolError);
  EXPECT_THROW(gw.embed("nan"), ProtocolError);
  EXPECT_THROW(gw.embed("none"), ProtocolError);
}
