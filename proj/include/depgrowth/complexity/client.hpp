#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "depgrowth/complexity/prompt.hpp"
#include "depgrowth/complexity/response.hpp"
#include "depgrowth/ingest/http_source.hpp"

namespace depgrowth::complexity {

/// Two-message chat in, plain text out. Implementations must be safe to call
/// from several threads at once.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  /// Throws ComplexityError(Transport) when the endpoint cannot be reached.
  virtual std::string complete(const PromptBundle& prompt) = 0;
  virtual std::string model_id() const = 0;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t prompt_hash(const PromptBundle& p) {
  return fnv1a(p.user_text, fnv1a(p.system_text));
}

inline std::string prompt_hash_hex(const PromptBundle& p) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = prompt_hash(p);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

/// Deterministic stand-in: the prompt hash picks one of the canned responses.
class MockModelClient final : public ModelClient {
 public:
  MockModelClient() : responses_(default_responses()) {}
  explicit MockModelClient(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  std::string complete(const PromptBundle& prompt) override {
    ++calls_;
    return responses_[prompt_hash(prompt) % responses_.size()];
  }
  std::string model_id() const override { return "mock"; }
  int calls() const { return calls_.load(); }

  static std::vector<std::string> default_responses() {
    std::vector<std::string> out;
    for (int r = kMinRating; r <= kMaxRating; ++r) {
      ComplexityRating c;
      c.required_skills = {"familiarity with the codebase", "skill level " + std::to_string(r)};
      c.reasoning = {"canned response " + std::to_string(r)};
      c.rating = r;
      out.push_back(render_rating_response(c));
    }
    return out;
  }

 private:
  std::vector<std::string> responses_;
  std::atomic<int> calls_{0};
};

struct ChatEndpoint {
  std::string url;  // e.g. https://api.example.com/v1/chat/completions
  std::string model;
  double temperature = 0.0;
  std::string token_env = "DEPGROWTH_MODEL_TOKEN";
  std::chrono::seconds timeout{120};
};

/// Chat-completions style JSON endpoint: {"model", "temperature", "messages":
/// [{"role":"system"}, {"role":"user"}]} in, choices[0].message.content out.
class HttpChatClient final : public ModelClient {
 public:
  explicit HttpChatClient(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    auto [host, path] = ingest::split_url(endpoint_.url);
    host_ = std::move(host);
    path_ = path.empty() ? "/" : path;
    if (const char* t = std::getenv(endpoint_.token_env.c_str())) token_ = t;
  }

  std::string complete(const PromptBundle& prompt) override {
    nlohmann::json body{
        {"model", endpoint_.model},
        {"temperature", endpoint_.temperature},
        {"messages",
         {{{"role", "system"}, {"content", prompt.system_text}},
          {{"role", "user"}, {"content", prompt.user_text}}}}};
    httplib::Client client(host_);
    client.set_connection_timeout(endpoint_.timeout);
    client.set_read_timeout(endpoint_.timeout);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
      throw ComplexityError(ComplexityErrc::Transport,
                            endpoint_.url + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ComplexityError(ComplexityErrc::Transport,
                            endpoint_.url + ": HTTP " + std::to_string(res->status));
    try {
      auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ComplexityError(ComplexityErrc::Transport,
                            endpoint_.url + ": unexpected reply body: " + e.what());
    }
  }

  std::string model_id() const override { return endpoint_.model; }

 private:
  ChatEndpoint endpoint_;
  std::string host_;
  std::string path_;
  std::string token_;
};

}  // namespace depgrowth::complexity
