// Protocol stub for the execution harness: reads one request line, runs main(*args) in the
// embedded interpreter, writes one response line. Anything printed by the snippet is dropped.

#include <pthread.h>

#include <cstdio>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "minipy.hpp"

namespace {

using nlohmann::json;

struct Job {
  json request;
  json response;
};

json failure(const json& case_id, const std::string& message) {
  return {{"case_id", case_id}, {"status", "error"}, {"error", message}};
}

void run(Job& job) {
  const json& case_id = job.request["case_id"];
  try {
    minipy::Interpreter interp;
    interp.exec(job.request["code"].get<std::string>());
    if (!interp.has_function("main")) {
      job.response = failure(case_id, "no-main");
      return;
    }
    json value = interp.call("main", job.request["args"]);
    job.response = {{"case_id", case_id}, {"status", "ok"}, {"value", std::move(value)}};
  } catch (const minipy::Unserializable& e) {
    job.response = failure(case_id, std::string("unserializable: ") + e.what());
  } catch (const std::exception& e) {
    job.response = failure(case_id, e.what());
  }
}

void* thread_main(void* arg) {
  run(*static_cast<Job*>(arg));
  return nullptr;
}

}  // namespace

int main() {
  std::string line;
  if (!std::getline(std::cin, line)) return 2;
  Job job;
  try {
    job.request = json::parse(line);
  } catch (const json::exception&) {
    return 2;
  }
  if (!job.request.is_object() || !job.request.contains("code") || !job.request["code"].is_string() ||
      !job.request.contains("case_id")) {
    return 2;
  }
  if (!job.request.contains("args")) job.request["args"] = json::array();

  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, 512u << 20);
  pthread_t tid;
  if (pthread_create(&tid, &attr, thread_main, &job) != 0) return 3;
  pthread_join(tid, nullptr);
  pthread_attr_destroy(&attr);

  const std::string out = job.response.dump(-1, ' ', false, json::error_handler_t::replace);
  std::fwrite(out.data(), 1, out.size(), stdout);
  std::fputc('\n', stdout);
  std::fflush(stdout);
  return 0;
}
