#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ggb/error.hpp"
#include "ggb/io.hpp"

namespace ggb {

struct ModelEndpoint {
  std::string base_url;        // http://host:port
  double timeout_s = 30.0;
  int max_retries = 3;
  std::string auth_token;      // optional bearer token
};

// Anything that can answer (screenshot, prompt) -> raw text. The HTTP
// client below is the production implementation; tests may plug in
// in-process fakes.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string predict(const std::string& image_path,
                              const std::string& prompt) = 0;
};

// POST /predict {image: base64 PNG, prompt} -> {text}. Retries
// idempotently with exponential backoff on connection faults and 5xx.
class HttpModelClient : public ModelClient {
 public:
  explicit HttpModelClient(ModelEndpoint endpoint)
      : endpoint_(std::move(endpoint)) {
    if (endpoint_.timeout_s <= 0)
      throw Error(ErrorKind::InvalidArgument, "timeout must be positive");
  }

  std::string predict(const std::string& image_path,
                      const std::string& prompt) override {
    json body{{"prompt", prompt}};
    body["image"] = image_path.empty() ? "" : base64_encode(read_file(image_path));
    const std::string payload = body.dump();
    const std::string request_id = "req-" + std::to_string(++counter_);

    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(
            base_backoff_ms_ << (attempt - 1)));
      httplib::Client cli(endpoint_.base_url);
      cli.set_connection_timeout(std::chrono::duration<double>(endpoint_.timeout_s));
      cli.set_read_timeout(std::chrono::duration<double>(endpoint_.timeout_s));
      if (!endpoint_.auth_token.empty())
        cli.set_bearer_token_auth(endpoint_.auth_token);

      auto res = cli.Post("/predict", payload, "application/json");
      if (!res) {
        last_error = request_id + ": connection failed (" +
                     httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status >= 500) {
        last_error = request_id + ": server status " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        throw Error(ErrorKind::Protocol,
                    request_id + ": status " + std::to_string(res->status));
      json reply = json::parse(res->body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("text") ||
          !reply["text"].is_string())
        throw Error(ErrorKind::Protocol,
                    request_id + ": response has no `text` field");
      return reply["text"].get<std::string>();
    }
    throw Error(ErrorKind::Connection, last_error, /*retryable=*/true);
  }

  void set_base_backoff_ms(int ms) { base_backoff_ms_ = ms; }

 private:
  ModelEndpoint endpoint_;
  int base_backoff_ms_ = 200;
  std::atomic<long long> counter_{0};
};

}  // namespace ggb
