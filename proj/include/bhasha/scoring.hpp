#pragma once

// Scoring protocol shared by every inference backend.
//
//   POST /v1/score     {"model", "prompt", "continuations": [..]}
//                   -> {"scores": [{"total_logprob", "token_count"}, ..]}
//   POST /v1/tokenize  {"model", "text"} -> {"count"}
//
// Log probabilities are natural-log. Adapters for services that report other
// bases convert before answering.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "bhasha/orderer.hpp"

namespace bhasha {

struct ContinuationScore {
  double total_logprob = 0.0;
  std::uint64_t token_count = 1;

  bool operator==(const ContinuationScore&) const = default;
};

struct ScoreRequest {
  std::string model;
  std::string prompt;
  std::vector<std::string> continuations;

  bool operator==(const ScoreRequest&) const = default;
};

struct ScoreResponse {
  std::vector<ContinuationScore> scores;

  bool operator==(const ScoreResponse&) const = default;
};

struct TokenizeRequest {
  std::string model;
  std::string text;
};

inline constexpr std::size_t kMaxContinuations = 10;

nlohmann::json to_json(const ScoreRequest& r);
nlohmann::json to_json(const ScoreResponse& r);
nlohmann::json to_json(const TokenizeRequest& r);
// Strict parsers: every violation of the wire schema is a ProtocolError.
ScoreRequest parse_score_request(const nlohmann::json& j);
ScoreResponse parse_score_response(const nlohmann::json& j);
std::uint64_t parse_tokenize_response(const nlohmann::json& j);
// Compact dump with lexicographically ordered keys.
std::string canonicalize(std::string_view json_text);

class Backend {
 public:
  virtual ~Backend() = default;
  // Retryable failures throw TransportError; malformed answers ProtocolError.
  virtual ScoreResponse score(const ScoreRequest& request) = 0;
  virtual std::uint64_t tokenize(const TokenizeRequest& request) = 0;
  // Stable description used in run-manifest fingerprints. Never includes
  // credentials.
  virtual std::string describe() const = 0;
};

// total_logprob = -(0.5 + 10 * u) * tokens, u in [0,1) from a SplitMix64-mixed
// FNV-1a hash of (seed, prompt, continuation); tokens = whitespace tokens of
// the continuation (at least 1). Stateless and thread-safe.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::uint64_t seed) : seed_(seed) {}

  ScoreResponse score(const ScoreRequest& request) override;
  std::uint64_t tokenize(const TokenizeRequest& request) override;
  std::string describe() const override { return "mock://" + std::to_string(seed_); }

  // Per-token score magnitude in [0.5, 10.5).
  double per_token_cost(std::string_view prompt, std::string_view continuation) const;

 private:
  std::uint64_t seed_;
};

class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string base_url, std::string auth_token,
              std::chrono::milliseconds timeout = std::chrono::seconds(60));

  ScoreResponse score(const ScoreRequest& request) override;
  std::uint64_t tokenize(const TokenizeRequest& request) override;
  std::string describe() const override { return base_url_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  std::string base_url_;
  std::string auth_token_;
  std::chrono::milliseconds timeout_;
};

// Appends one canonical {"endpoint","request","response"} line per call.
class RecordingBackend final : public Backend {
 public:
  RecordingBackend(Backend& inner, std::filesystem::path fixture_path);

  ScoreResponse score(const ScoreRequest& request) override;
  std::uint64_t tokenize(const TokenizeRequest& request) override;
  std::string describe() const override { return inner_.describe(); }

 private:
  void append(std::string_view endpoint, const nlohmann::json& req, const nlohmann::json& resp);

  Backend& inner_;
  std::filesystem::path path_;
  std::mutex mu_;
};

// Serves responses from a fixture file written by RecordingBackend. Unknown
// requests are a ProtocolError.
class ReplayBackend final : public Backend {
 public:
  explicit ReplayBackend(const std::filesystem::path& fixture_path);

  ScoreResponse score(const ScoreRequest& request) override;
  std::uint64_t tokenize(const TokenizeRequest& request) override;
  std::string describe() const override { return "replay://" + source_; }
  std::size_t size() const { return responses_.size(); }

 private:
  std::string source_;
  std::map<std::string, nlohmann::json> responses_;
};

// "mock://SEED", "replay://PATH" or an http(s) base URL.
std::unique_ptr<Backend> make_backend(const std::string& url, const std::string& auth_token = {});

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{5000};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

// Thread-safe front end over a Backend: request validation, bounded in-flight
// calls, exponential-backoff retries on TransportError and response checks.
class ScoringClient {
 public:
  explicit ScoringClient(Backend& backend, RetryPolicy policy = {}, std::ptrdiff_t max_in_flight = 8);

  ScoreResponse score_continuations(const ScoreRequest& request);
  std::uint64_t count_tokens(const std::string& model, const std::string& text);

  Backend& backend() { return backend_; }
  std::uint64_t retries() const { return retries_.load(); }

 private:
  template <typename F>
  auto with_retries(F&& call) -> decltype(call());

  Backend& backend_;
  RetryPolicy policy_;
  std::counting_semaphore<64> in_flight_;
  std::atomic<std::uint64_t> retries_{0};
};

ScoreResponse score_continuations(const ScoreRequest& request, Backend& backend);
std::uint64_t count_tokens(const std::string& text, Backend& backend, const std::string& model = {});

// Lets the orderer measure prompts through a backend.
class BackendTokenCounter final : public TokenCounter {
 public:
  BackendTokenCounter(ScoringClient& client, std::string model)
      : client_(client), model_(std::move(model)) {}
  std::uint64_t count_tokens(std::string_view text) override {
    return client_.count_tokens(model_, std::string(text));
  }

 private:
  ScoringClient& client_;
  std::string model_;
};

}  // namespace bhasha
