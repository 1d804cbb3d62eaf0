#include "bhasha/scoring.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include "httplib.h"

#include "bhasha/rng.hpp"

namespace bhasha {

using nlohmann::json;

json to_json(const ScoreRequest& r) {
  return json{{"model", r.model}, {"prompt", r.prompt}, {"continuations", r.continuations}};
}

json to_json(const ScoreResponse& r) {
  json scores = json::array();
  for (const auto& s : r.scores)
    scores.push_back({{"total_logprob", s.total_logprob}, {"token_count", s.token_count}});
  return json{{"scores", std::move(scores)}};
}

json to_json(const TokenizeRequest& r) { return json{{"model", r.model}, {"text", r.text}}; }

namespace {

const json& member(const json& j, const char* key) {
  if (!j.is_object()) throw ProtocolError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_member(const json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t count_member(const json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 1))
    throw ProtocolError(std::string("field '") + key + "' must be a positive integer");
  return v.get<std::uint64_t>();
}

}  // namespace

ScoreRequest parse_score_request(const json& j) {
  ScoreRequest r{string_member(j, "model"), string_member(j, "prompt"), {}};
  const auto& conts = member(j, "continuations");
  if (!conts.is_array()) throw ProtocolError("continuations must be an array");
  for (const auto& c : conts) {
    if (!c.is_string()) throw ProtocolError("continuations must be strings");
    r.continuations.push_back(c.get<std::string>());
  }
  return r;
}

ScoreResponse parse_score_response(const json& j) {
  const auto& scores = member(j, "scores");
  if (!scores.is_array()) throw ProtocolError("scores must be an array");
  ScoreResponse r;
  for (const auto& s : scores) {
    const auto& lp = member(s, "total_logprob");
    if (!lp.is_number()) throw ProtocolError("total_logprob must be a number");
    const double v = lp.get<double>();
    if (!std::isfinite(v)) throw ProtocolError("total_logprob must be finite");
    r.scores.push_back({v, count_member(s, "token_count")});
  }
  return r;
}

std::uint64_t parse_tokenize_response(const json& j) { return count_member(j, "count"); }

std::string canonicalize(std::string_view json_text) {
  json j = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded()) throw ProtocolError("not valid JSON");
  return j.dump();
}

// --- mock --------------------------------------------------------------------

double MockBackend::per_token_cost(std::string_view prompt, std::string_view continuation) const {
  Fnv1a64 h;
  h.update_u64(seed_).update_u64(prompt.size()).update(prompt);
  h.update_u64(continuation.size()).update(continuation);
  return 0.5 + 10.0 * unit_interval(SplitMix64::mix(h.digest()));
}

ScoreResponse MockBackend::score(const ScoreRequest& request) {
  ScoreResponse r;
  r.scores.reserve(request.continuations.size());
  for (const auto& c : request.continuations) {
    const std::uint64_t tokens = std::max<std::uint64_t>(1, whitespace_token_count(c));
    r.scores.push_back({-per_token_cost(request.prompt, c) * static_cast<double>(tokens), tokens});
  }
  return r;
}

std::uint64_t MockBackend::tokenize(const TokenizeRequest& request) {
  return whitespace_token_count(request.text);
}

// --- http --------------------------------------------------------------------

HttpBackend::HttpBackend(std::string base_url, std::string auth_token,
                         std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), auth_token_(std::move(auth_token)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

json HttpBackend::post(const std::string& path, const json& body) {
  // Split "scheme://host:port/prefix" into the part httplib connects to and
  // an optional path prefix.
  const auto scheme_end = base_url_.find("://");
  const auto path_start =
      base_url_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = base_url_.substr(0, path_start);
  const std::string prefix = path_start == std::string::npos ? "" : base_url_.substr(path_start);

  httplib::Client cli(origin);
  if (!cli.is_valid()) throw UsageError("invalid backend URL '" + base_url_ + "'");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  if (!auth_token_.empty()) cli.set_bearer_token_auth(auth_token_);

  auto res = cli.Post(prefix + path, body.dump(), "application/json; charset=utf-8");
  if (!res) throw TransportError("POST " + prefix + path + " failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransportError("POST " + prefix + path + " returned HTTP " + std::to_string(res->status));
  if (res->status != 200)
    throw ProtocolError("POST " + prefix + path + " returned HTTP " + std::to_string(res->status));
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) throw ProtocolError("response body is not JSON");
  return parsed;
}

ScoreResponse HttpBackend::score(const ScoreRequest& request) {
  return parse_score_response(post("/v1/score", to_json(request)));
}

std::uint64_t HttpBackend::tokenize(const TokenizeRequest& request) {
  return parse_tokenize_response(post("/v1/tokenize", to_json(request)));
}

// --- record / replay -----------------------------------------------------------

RecordingBackend::RecordingBackend(Backend& inner, std::filesystem::path fixture_path)
    : inner_(inner), path_(std::move(fixture_path)) {}

void RecordingBackend::append(std::string_view endpoint, const json& req, const json& resp) {
  json line{{"endpoint", endpoint}, {"request", req}, {"response", resp}};
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to fixture " + path_.string());
  out << line.dump() << '\n';
}

ScoreResponse RecordingBackend::score(const ScoreRequest& request) {
  auto resp = inner_.score(request);
  append("/v1/score", to_json(request), to_json(resp));
  return resp;
}

std::uint64_t RecordingBackend::tokenize(const TokenizeRequest& request) {
  auto count = inner_.tokenize(request);
  append("/v1/tokenize", to_json(request), json{{"count", count}});
  return count;
}

namespace {

std::string replay_key(std::string_view endpoint, const json& request) {
  return std::string(endpoint) + " " + request.dump();
}

}  // namespace

ReplayBackend::ReplayBackend(const std::filesystem::path& fixture_path)
    : source_(fixture_path.string()) {
  std::ifstream in(fixture_path, std::ios::binary);
  if (!in) throw IoError("cannot read fixture " + fixture_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("endpoint") || !j.contains("request") ||
        !j.contains("response"))
      throw DataError("fixture line " + std::to_string(line_no) + " is malformed");
    responses_[replay_key(j["endpoint"].get<std::string>(), j["request"])] = j["response"];
  }
}

ScoreResponse ReplayBackend::score(const ScoreRequest& request) {
  auto it = responses_.find(replay_key("/v1/score", to_json(request)));
  if (it == responses_.end()) throw ProtocolError("no recorded response for score request");
  return parse_score_response(it->second);
}

std::uint64_t ReplayBackend::tokenize(const TokenizeRequest& request) {
  auto it = responses_.find(replay_key("/v1/tokenize", to_json(request)));
  if (it == responses_.end()) throw ProtocolError("no recorded response for tokenize request");
  return parse_tokenize_response(it->second);
}

std::unique_ptr<Backend> make_backend(const std::string& url, const std::string& auth_token) {
  if (url.starts_with("mock://")) {
    const auto seed_text = url.substr(7);
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(seed_text, &used);
      if (used != seed_text.size()) throw std::invalid_argument(seed_text);
      return std::make_unique<MockBackend>(seed);
    } catch (const std::logic_error&) {
      throw UsageError("mock backend needs a numeric seed: '" + url + "'");
    }
  }
  if (url.starts_with("replay://")) return std::make_unique<ReplayBackend>(url.substr(9));
  if (url.starts_with("http://") || url.starts_with("https://"))
    return std::make_unique<HttpBackend>(url, auth_token);
  throw UsageError("unsupported backend URL '" + url + "'");
}

// --- client --------------------------------------------------------------------

ScoringClient::ScoringClient(Backend& backend, RetryPolicy policy, std::ptrdiff_t max_in_flight)
    : backend_(backend), policy_(std::move(policy)), in_flight_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 64)) {
  if (policy_.max_attempts < 1) policy_.max_attempts = 1;
  if (!policy_.sleep) policy_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

template <typename F>
auto ScoringClient::with_retries(F&& call) -> decltype(call()) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<64>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  auto backoff = policy_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return call();
    } catch (const TransportError& e) {
      if (attempt >= policy_.max_attempts)
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt) +
                             " attempts)");
    }
    ++retries_;
    policy_.sleep(backoff);
    backoff = std::min(policy_.max_backoff,
                       std::chrono::milliseconds(static_cast<std::int64_t>(
                           static_cast<double>(backoff.count()) * policy_.multiplier)));
  }
}

ScoreResponse ScoringClient::score_continuations(const ScoreRequest& request) {
  if (request.continuations.empty()) throw DataError("score request has no continuations");
  if (request.continuations.size() > kMaxContinuations)
    throw DataError("score request has more than 10 continuations");
  auto resp = with_retries([&] { return backend_.score(request); });
  if (resp.scores.size() != request.continuations.size())
    throw ProtocolError("backend returned " + std::to_string(resp.scores.size()) + " scores for " +
                        std::to_string(request.continuations.size()) + " continuations");
  for (const auto& s : resp.scores) {
    if (s.token_count < 1) throw ProtocolError("token_count must be >= 1");
    if (!std::isfinite(s.total_logprob)) throw ProtocolError("total_logprob must be finite");
  }
  return resp;
}

std::uint64_t ScoringClient::count_tokens(const std::string& model, const std::string& text) {
  if (text.empty()) throw DataError("empty input");
  const auto n = with_retries([&] { return backend_.tokenize({model, text}); });
  if (n < 1) throw ProtocolError("tokenize returned a zero count");
  return n;
}

ScoreResponse score_continuations(const ScoreRequest& request, Backend& backend) {
  ScoringClient client(backend);
  return client.score_continuations(request);
}

std::uint64_t count_tokens(const std::string& text, Backend& backend, const std::string& model) {
  ScoringClient client(backend);
  return client.count_tokens(model, text);
}

}  // namespace bhasha
