#include "doctest.h"

#include <atomic>
#include <fstream>
#include <thread>

#include "httplib.h"

#include "bhasha/scoring.hpp"
#include "support.hpp"

using namespace bhasha;
using nlohmann::json;

namespace {

const std::string kPrompt = "Q ### A) x, B) y ### MCQ ### :";

// A small scoring service: answers with the mock backend, but the first
// `failures` score calls get HTTP 503 and the bearer token must match.
class FakeService {
 public:
  explicit FakeService(int failures = 0, std::string token = "secret")
      : failures_(failures), token_(std::move(token)) {
    server_.Post("/api/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_auth = req.get_header_value("Authorization");
      if (failures_-- > 0) {
        res.status = 503;
        return;
      }
      if (last_auth != "Bearer " + token_) {
        res.status = 401;
        return;
      }
      auto body = json::parse(req.body);
      if (body["prompt"] == "bad-json") {
        res.set_content("{not json", "application/json");
        return;
      }
      if (body["prompt"] == "short") {
        res.set_content(R"({"scores":[{"total_logprob":-1.0,"token_count":1}]})", "application/json");
        return;
      }
      res.set_content(to_json(mock_.score(parse_score_request(body))).dump(), "application/json");
    });
    server_.Post("/api/v1/tokenize", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = json::parse(req.body);
      res.set_content(json{{"count", mock_.tokenize({"", body["text"].get<std::string>()})}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }

  std::atomic<int> calls{0};
  std::string last_auth;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_;
  std::string token_;
  MockBackend mock_{1024};
};

RetryPolicy no_sleep(int attempts, std::vector<long>* slept = nullptr) {
  RetryPolicy p;
  p.max_attempts = attempts;
  p.sleep = [slept](std::chrono::milliseconds d) {
    if (slept) slept->push_back(d.count());
  };
  return p;
}

// Backend that fails with a transport error a fixed number of times.
class Flaky final : public Backend {
 public:
  explicit Flaky(int failures) : failures_(failures) {}
  ScoreResponse score(const ScoreRequest& r) override {
    if (failures_-- > 0) throw TransportError("down");
    return mock_.score(r);
  }
  std::uint64_t tokenize(const TokenizeRequest& r) override { return mock_.tokenize(r); }
  std::string describe() const override { return "flaky"; }

 private:
  int failures_;
  MockBackend mock_{1};
};

}  // namespace

TEST_CASE("wire format round trips") {
  ScoreRequest req{"m", kPrompt, {" x", " y", " नदी"}};
  CHECK(parse_score_request(to_json(req)) == req);
  ScoreResponse resp{{{-1.5, 1}, {-0.25, 3}}};
  CHECK(parse_score_response(json::parse(to_json(resp).dump())) == resp);
  CHECK(parse_tokenize_response(json{{"count", 4}}) == 4);
}

TEST_CASE("strict response parsing") {
  CHECK_THROWS_AS(parse_score_response(json::array()), ProtocolError);
  CHECK_THROWS_AS(parse_score_response(json{{"scores", 1}}), ProtocolError);
  CHECK_THROWS_AS(parse_score_response(json::parse(R"({"scores":[{"total_logprob":-1}]})")), ProtocolError);
  CHECK_THROWS_AS(parse_score_response(json::parse(R"({"scores":[{"total_logprob":"x","token_count":1}]})")),
                  ProtocolError);
  CHECK_THROWS_AS(parse_score_response(json::parse(R"({"scores":[{"total_logprob":-1,"token_count":0}]})")),
                  ProtocolError);
  CHECK_THROWS_AS(parse_score_response(json::parse(R"({"scores":[{"total_logprob":-1,"token_count":1.5}]})")),
                  ProtocolError);
  CHECK_THROWS_AS(parse_tokenize_response(json{{"count", -2}}), ProtocolError);
  CHECK(canonicalize(R"({ "b": 1, "a": [1, 2] })") == R"({"a":[1,2],"b":1})");
  CHECK_THROWS_AS(canonicalize("{"), ProtocolError);
}

TEST_CASE("mock backend") {
  MockBackend mock(1024);
  ScoreRequest req{"m", kPrompt, {" x", " y", " z w"}};
  const auto a = mock.score(req);
  CHECK(a == mock.score(req));
  REQUIRE(a.scores.size() == 3);
  CHECK(a.scores[2].token_count == 2);
  CHECK(mock.tokenize({"m", "a b c"}) == 3);
  CHECK(mock.score({"m", "p", {"yes"}}).scores[0].token_count == 1);
  CHECK(mock.score({"m", "p", {""}}).scores[0].token_count == 1);

  for (const auto& row : testing::load_json("tests/fixtures/mock_scores.json")) {
    MockBackend m(row["seed"].get<std::uint64_t>());
    const auto r = m.score({"", row["prompt"], {row["continuation"].get<std::string>()}});
    CHECK(r.scores[0].total_logprob == row["total_logprob"].get<double>());
    CHECK(r.scores[0].token_count == row["token_count"].get<std::uint64_t>());
  }
}

TEST_CASE("mock seeds separate") {
  std::size_t collisions = 0;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const auto p = "prompt " + std::to_string(i);
    collisions += MockBackend(i).per_token_cost(p, " a") == MockBackend(i + 1).per_token_cost(p, " a");
  }
  CHECK(collisions == 0);
}

TEST_CASE("client validates requests and responses") {
  MockBackend mock(1);
  ScoringClient client(mock);
  CHECK_THROWS_AS(client.score_continuations({"m", "p", {}}), DataError);
  CHECK_THROWS_AS(client.score_continuations({"m", "p", std::vector<std::string>(11, " a")}), DataError);
  CHECK(client.score_continuations({"m", "p", std::vector<std::string>(10, " a")}).scores.size() == 10);
  CHECK_THROWS_WITH_AS(client.count_tokens("m", ""), "empty input", DataError);
  CHECK(count_tokens("a b c", mock) == 3);
  const auto r = score_continuations({"m", "p", {" 1", " 2", " 3"}}, mock);
  CHECK(r.scores.size() == 3);
}

TEST_CASE("client retries transport errors with backoff") {
  std::vector<long> slept;
  Flaky flaky(2);
  ScoringClient client(flaky, no_sleep(3, &slept));
  CHECK(client.score_continuations({"m", "p", {" a"}}).scores.size() == 1);
  CHECK(client.retries() == 2);
  CHECK(slept == std::vector<long>{100, 200});

  Flaky down(5);
  ScoringClient impatient(down, no_sleep(3));
  CHECK_THROWS_AS(impatient.score_continuations({"m", "p", {" a"}}), TransportError);
}

TEST_CASE("http backend against a local service") {
  FakeService service(1);
  HttpBackend http(service.url(), "secret", std::chrono::seconds(5));
  ScoringClient client(http, no_sleep(3));
  ScoreRequest req{"m", kPrompt, {" x", " y"}};
  const auto got = client.score_continuations(req);
  CHECK(got == MockBackend(1024).score(req));
  CHECK(service.calls == 2);
  CHECK(client.retries() == 1);
  CHECK(service.last_auth == "Bearer secret");
  CHECK(client.count_tokens("m", "a b c") == 3);

  CHECK_THROWS_AS(client.score_continuations({"m", "bad-json", {" x"}}), ProtocolError);
  CHECK_THROWS_AS(client.score_continuations({"m", "short", {" x", " y"}}), ProtocolError);

  HttpBackend wrong_token(service.url(), "nope", std::chrono::seconds(5));
  CHECK_THROWS_AS(wrong_token.score(req), ProtocolError);
  CHECK(wrong_token.describe().find("nope") == std::string::npos);
}

TEST_CASE("unreachable service is a transport error") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpBackend http("http://127.0.0.1:" + std::to_string(port), "", std::chrono::seconds(2));
  ScoringClient client(http, no_sleep(2));
  CHECK_THROWS_AS(client.score_continuations({"m", "p", {" a"}}), TransportError);
  CHECK(client.retries() == 1);
}

TEST_CASE("record and replay") {
  testing::TempDir dir;
  const auto fixture = dir / "fixture.jsonl";
  FakeService service;
  HttpBackend live(service.url(), "secret", std::chrono::seconds(5));
  RecordingBackend recorder(live, fixture);
  ScoreRequest req{"m", kPrompt, {" x", " y"}};
  const auto live_resp = recorder.score(req);
  const auto live_count = recorder.tokenize({"m", kPrompt});

  ReplayBackend replay(fixture);
  CHECK(replay.size() == 2);
  CHECK(canonicalize(to_json(replay.score(req)).dump()) == canonicalize(to_json(live_resp).dump()));
  CHECK(replay.tokenize({"m", kPrompt}) == live_count);
  CHECK_THROWS_AS(replay.score({"m", "unseen", {" x"}}), ProtocolError);

  auto from_url = make_backend("replay://" + fixture.string());
  CHECK(from_url->score(req) == live_resp);
}

TEST_CASE("make_backend") {
  CHECK(make_backend("mock://7")->describe() == "mock://7");
  CHECK(make_backend("http://localhost:9/x/", "tok")->describe() == "http://localhost:9/x");
  CHECK_THROWS_AS(make_backend("mock://seven"), UsageError);
  CHECK_THROWS_AS(make_backend("ftp://x"), UsageError);
  CHECK_THROWS_AS(make_backend("replay:///nonexistent/fixture.jsonl"), IoError);
}
