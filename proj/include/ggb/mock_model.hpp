#pragma once

#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ggb/error.hpp"

namespace ggb {

// Answer key for the oracle mock: exact prompt match first, then the
// first entry whose `match` string occurs in the prompt.
struct AnswerKey {
  std::map<std::string, std::string> exact;
  std::vector<std::pair<std::string, std::string>> substring;

  static AnswerKey from_jsonl(const std::vector<nlohmann::json>& lines) {
    AnswerKey key;
    for (const auto& j : lines) {
      std::string text = j.at("text").get<std::string>();
      if (j.contains("prompt"))
        key.exact[j.at("prompt").get<std::string>()] = text;
      else
        key.substring.push_back({j.at("match").get<std::string>(), text});
    }
    return key;
  }

  const std::string* lookup(const std::string& prompt) const {
    auto it = exact.find(prompt);
    if (it != exact.end()) return &it->second;
    for (const auto& [needle, text] : substring)
      if (prompt.find(needle) != std::string::npos) return &text;
    return nullptr;
  }
};

enum class MockMode { oracle, constant, gibberish };

// In-process model server speaking the /predict wire protocol. Used by
// the acceptance suite and available as a standalone tool.
class MockModelServer {
 public:
  MockModelServer(MockMode mode, AnswerKey key = {},
                  std::string constant_text = "(0.00, 0.00)")
      : mode_(mode), key_(std::move(key)), constant_(std::move(constant_text)) {
    server_.Post("/predict", [this](const httplib::Request& req,
                                    httplib::Response& res) {
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("prompt")) {
        res.status = 400;
        res.set_content(R"({"error":"bad request"})", "application/json");
        return;
      }
      std::string prompt = body["prompt"].get<std::string>();
      std::string text;
      switch (mode_) {
        case MockMode::constant:
          text = constant_;
          break;
        case MockMode::gibberish:
          text = "lorem ipsum dolor sit amet";
          break;
        case MockMode::oracle: {
          const std::string* answer = key_.lookup(prompt);
          if (!answer) {
            res.status = 404;
            res.set_content(R"({"error":"no answer for prompt"})",
                            "application/json");
            return;
          }
          text = *answer;
        }
      }
      res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
    });
  }

  // Binds to an ephemeral port and serves on a background thread.
  int start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw Error(ErrorKind::Connection, "cannot bind mock server");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Binds a fixed port and serves on a background thread.
  int start_on(int port) {
    if (!server_.bind_to_port("127.0.0.1", port))
      throw Error(ErrorKind::Connection,
                  "cannot bind port " + std::to_string(port));
    port_ = port;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Blocks until the server is stopped.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  ~MockModelServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  MockMode mode_;
  AnswerKey key_;
  std::string constant_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace ggb
