#include "doctest.h"

#include "bhasha/evaluator.hpp"
#include "logs.hpp"
#include "published_tables.hpp"
#include "support.hpp"

using namespace bhasha;

namespace {

// Scores continuations containing "gold" far above the rest.
class Rigged final : public Backend {
 public:
  ScoreResponse score(const ScoreRequest& r) override {
    ScoreResponse out;
    for (const auto& c : r.continuations)
      out.scores.push_back({c.find("gold") != std::string::npos ? -0.1 : -9.0, 1});
    return out;
  }
  std::uint64_t tokenize(const TokenizeRequest&) override { return 1; }
  std::string describe() const override { return "rigged"; }
};

// Returns fixed raw scores and records the last request.
class Fixed final : public Backend {
 public:
  explicit Fixed(std::vector<ContinuationScore> s) : scores_(std::move(s)) {}
  ScoreResponse score(const ScoreRequest& r) override {
    last = r;
    return {scores_};
  }
  std::uint64_t tokenize(const TokenizeRequest&) override { return 1; }
  std::string describe() const override { return "fixed"; }
  ScoreRequest last;

 private:
  std::vector<ContinuationScore> scores_;
};

// Fails every request whose prompt mentions FAIL.
class Partial final : public Backend {
 public:
  ScoreResponse score(const ScoreRequest& r) override {
    if (r.prompt.find("FAIL") != std::string::npos) throw TransportError("refused");
    return mock_.score(r);
  }
  std::uint64_t tokenize(const TokenizeRequest& r) override { return mock_.tokenize(r); }
  std::string describe() const override { return "partial"; }

 private:
  MockBackend mock_{3};
};

RetryPolicy no_retry() {
  RetryPolicy p;
  p.max_attempts = 1;
  return p;
}

BenchmarkItem mcq(std::string id, std::vector<std::string> choices, int gold, Language lang = Language::En,
                  std::string bench = "ARC-C") {
  return {std::move(id), std::move(bench), "Which one?", std::nullopt, std::move(choices), gold, lang, std::nullopt};
}

ScoreTable table_of(double BenchmarkRowValue(const published::BenchmarkRow&)) {
  ScoreTable t;
  for (const auto& r : published::model_comparison())
    t[{r.benchmark, parse_language(r.language)}] = BenchmarkRowValue(r);
  return t;
}

}  // namespace

TEST_CASE("normalization modes") {
  const ContinuationScore a{-1.0, 1}, b{-4.0, 2};
  CHECK(normalize_score(a, 2, NormalizationMode::MeanPerToken) == -1.0);
  CHECK(normalize_score(b, 2, NormalizationMode::MeanPerToken) == -2.0);
  CHECK(normalize_score(b, 2, NormalizationMode::Unnormalized) == -4.0);
  CHECK(normalize_score(b, 8, NormalizationMode::ByteLengthNormalized) == -0.5);
  CHECK(parse_norm("bytes") == NormalizationMode::ByteLengthNormalized);
  CHECK(to_string(NormalizationMode::Unnormalized) == "sum");
  CHECK_THROWS_AS(parse_norm("max"), UsageError);
  CHECK(parse_target_style("letter") == TargetStyle::ChoiceLetter);
}

TEST_CASE("argmax ties go to the lowest index") {
  const std::vector<double> tie{-1.0, -1.0, -2.0};
  CHECK(argmax_lowest(tie) == 0);
  const std::vector<double> later{-3.0, -1.0, -1.0};
  CHECK(argmax_lowest(later) == 1);
  CHECK(argmax_lowest(std::span<const double>{}) == -1);
}

TEST_CASE("hand-computed item") {
  Fixed backend({{-1.0, 1}, {-4.0, 2}});
  ScoringClient client(backend);
  EvalOptions opts;
  const auto s = score_item(mcq("i", {"x", "y"}, 0), client, opts);
  CHECK(s.normalized == std::vector<double>{-1.0, -2.0});
  CHECK(s.predicted_index == 0);
  CHECK(s.correct());
  CHECK(backend.last.prompt == "Which one? ### A) x, B) y ### MCQ ### :");
  CHECK(backend.last.continuations == std::vector<std::string>{" x", " y"});

  opts.target = TargetStyle::ChoiceLetter;
  score_item(mcq("i", {"x", "y"}, 0), client, opts);
  CHECK(backend.last.continuations == std::vector<std::string>{" A", " B"});
}

TEST_CASE("identical choices pick the first") {
  MockBackend mock(1);
  ScoringClient client(mock);
  EvalOptions opts;
  for (auto norm : {NormalizationMode::MeanPerToken, NormalizationMode::Unnormalized,
                    NormalizationMode::ByteLengthNormalized}) {
    opts.norm = norm;
    CHECK(score_item(mcq("i", {"same", "same", "same"}, 2), client, opts).predicted_index == 0);
  }
}

TEST_CASE("boolean items, context and chat template") {
  Fixed backend({{-2.0, 1}, {-1.0, 1}});
  ScoringClient client(backend);
  EvalOptions opts;
  opts.chat = ChatTemplate("<s>{user}</s>");
  BenchmarkItem item{"b", "BoolQ", "Is it wet?", std::string("It rained."), {"True", "False"}, 1,
                     Language::Hi, std::nullopt};
  const auto s = score_item(item, client, opts);
  CHECK(backend.last.prompt == "<s>It rained.\nIs it wet? ### BOOLEAN ### :</s>");
  CHECK(backend.last.continuations == std::vector<std::string>{" हाँ", " नहीं"});
  CHECK(s.predicted_index == 1);

  opts.boolean_answers["BoolQ"][Language::Hi] = {"सही", "गलत"};
  score_item(item, client, opts);
  CHECK(backend.last.continuations == std::vector<std::string>{" सही", " गलत"});
}

TEST_CASE("constant per-token shift keeps mean-per-token predictions") {
  MockBackend mock(1024);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> conts;
    for (int k = 0; k < 4; ++k) conts.push_back(" " + testing::random_words(rng, 4));
    const auto resp = mock.score({"m", "q" + std::to_string(i), conts});
    std::vector<double> base, shifted;
    for (const auto& s : resp.scores) {
      base.push_back(normalize_score(s, 0, NormalizationMode::MeanPerToken));
      ContinuationScore moved{s.total_logprob + (-0.75) * static_cast<double>(s.token_count), s.token_count};
      shifted.push_back(normalize_score(moved, 0, NormalizationMode::MeanPerToken));
    }
    CHECK(argmax_lowest(base) == argmax_lowest(shifted));
  }
}

TEST_CASE("rigged backend gives perfect accuracy") {
  Rigged rigged;
  ScoringClient client(rigged);
  std::vector<BenchmarkItem> items;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> choices{"other a", "other b", "other c", "other d"};
    choices[i % 4] = "gold";
    items.push_back(mcq("q" + std::to_string(i), choices, i % 4));
  }
  const auto report = evaluate(items, client, EvalOptions{});
  REQUIRE(report.results.size() == 1);
  CHECK(report.results[0].accuracy == 1.0);
  CHECK(report.backend == "rigged");
}

TEST_CASE("uniform predictions give chance accuracy") {
  MockBackend mock(1024);
  ScoringClient client(mock);
  std::vector<BenchmarkItem> items;
  std::mt19937_64 rng(77);
  for (int i = 0; i < 10'000; ++i)
    items.push_back(mcq("q" + std::to_string(i), {"alpha", "beta", "gamma", "delta"},
                        static_cast<int>(rng() % 4)));
  const auto report = evaluate(items, client, EvalOptions{});
  CHECK(std::abs(report.results[0].accuracy - 0.25) <= 0.02);
}

TEST_CASE("evaluate rejects empty and invalid input") {
  MockBackend mock(1);
  ScoringClient client(mock);
  CHECK_THROWS_WITH_AS(evaluate({}, client, EvalOptions{}), "no items", DataError);
  const std::vector<BenchmarkItem> bad{mcq("q", {"a", "b"}, 5)};
  CHECK_THROWS_AS(evaluate(bad, client, EvalOptions{}), DataError);
}

TEST_CASE("unscored items are counted, not dropped") {
  Partial partial;
  ScoringClient client(partial, no_retry());
  std::vector<BenchmarkItem> items{mcq("a", {"x", "y"}, 0), mcq("b", {"x", "y"}, 1)};
  items[1].question = "FAIL";
  const auto report = evaluate(items, client, EvalOptions{});
  CHECK(report.unscored() == 1);
  CHECK(report.results[0].n_items == 1);
  CHECK(report.results[0].unscored[0].error.rfind("transport", 0) == 0);
}

TEST_CASE("aggregation ignores input order") {
  MockBackend mock(5);
  ScoringClient client(mock);
  std::vector<BenchmarkItem> items;
  for (int i = 0; i < 40; ++i)
    items.push_back(mcq("q" + std::to_string(i), {"a", "b", "c"}, i % 3,
                        i % 2 ? Language::Hi : Language::En, i % 3 ? "MMLU" : "ARC-E"));
  const auto a = to_json(evaluate(items, client, EvalOptions{}));
  std::reverse(items.begin(), items.end());
  const auto b = to_json(evaluate(items, client, EvalOptions{}));
  CHECK(a.dump() == b.dump());
  CHECK(eval_report_from_json(a).results.size() == 4);
  CHECK(to_json(eval_report_from_json(a)).dump() == a.dump());
}

TEST_CASE("toy benchmark matches the recorded accuracy") {
  std::vector<BenchmarkItem> items;
  std::ifstream in(testing::source_path("data/toy/bench.jsonl"));
  std::string line;
  while (std::getline(in, line)) items.push_back(item_from_json(nlohmann::json::parse(line)));
  const auto fx = testing::load_json("tests/fixtures/toy_eval.json");
  MockBackend mock(fx["seed"].get<std::uint64_t>());
  ScoringClient client(mock);
  for (const auto& [norm, groups] : fx["by_norm"].items()) {
    EvalOptions opts;
    opts.norm = parse_norm(norm);
    const auto report = evaluate(items, client, opts);
    for (const auto& [key, expect] : groups.items()) {
      const auto slash = key.find('/');
      const auto* r = report.find(key.substr(0, slash), parse_language(key.substr(slash + 1)));
      REQUIRE(r);
      CAPTURE(norm);
      CAPTURE(key);
      CHECK(r->n_items == expect["n"].get<std::size_t>());
      CHECK(r->n_correct == expect["correct"].get<std::size_t>());
    }
  }
}

TEST_CASE("averages") {
  const std::map<std::string, double> ours{
      {"ARC-C", 90.61}, {"ARC-E", 94.82}, {"BoolQ", 88.53}, {"CMCQ", 90.70}, {"MMLU", 75.00}};
  CHECK(average_scores(ours) == doctest::Approx(87.932));
  const std::map<std::string, double> flat{
      {"ARC-C", 42.0}, {"ARC-E", 42.0}, {"BoolQ", 42.0}, {"CMCQ", 42.0}, {"MMLU", 42.0}};
  CHECK(average_scores(flat) == doctest::Approx(42.0));
  auto missing = ours;
  missing.erase("CMCQ");
  CHECK_THROWS_WITH_AS(average_scores(missing), "missing benchmark 'CMCQ'", DataError);

  const auto qwen = table_of([](const published::BenchmarkRow& r) { return r.qwen; });
  CHECK(std::abs(average_scores(qwen, Language::Hi) - 71.31) <= 0.005);
  CHECK(std::abs((87.60 + 71.31) / 2.0 - 79.46) <= 0.005 + 1e-9);
}

TEST_CASE("printed averages are checked, not trusted") {
  const std::vector<double> ours_hi{81.23, 74.06, 84.07, 78.20, 53.85};
  const auto check = check_printed_average(ours_hi, published::kOurQwenPrinted.hi);
  CHECK_FALSE(check.consistent);
  CHECK(check.computed == doctest::Approx(74.282));
  const std::vector<double> ours_en{90.61, 94.82, 88.53, 90.70, 75.00};
  CHECK(check_printed_average(ours_en, published::kOurQwenPrinted.en).consistent);
}

TEST_CASE("run comparison") {
  const auto base = table_of([](const published::BenchmarkRow& r) { return r.qwen; });
  const auto cand = table_of([](const published::BenchmarkRow& r) { return r.our_qwen; });
  const auto t = compare_runs(base, cand, "Qwen-2.5-14B-Instruct", "Our Qwen");
  auto row = [&](const std::string& b, const std::string& l) {
    for (const auto& r : t.rows)
      if (r.benchmark == b && r.language == l) return r;
    FAIL("row missing");
    return DeltaRow{};
  };
  CHECK(row("BoolQ", "hi").delta() == doctest::Approx(5.18));
  CHECK(row("ARC-E", "en").delta() == doctest::Approx(-0.63));
  REQUIRE(t.averages.size() == 3);
  CHECK(std::abs(t.averages[0].candidate - 87.93) <= 0.005);

  const auto md = render_markdown(t);
  CHECK(md.find("| BoolQ | hi | 78.89 | 84.07 | ▲ 5.18 |") != std::string::npos);
  CHECK(md.find("| ARC-E | en | 95.45 | 94.82 | ▼ 0.63 |") != std::string::npos);
  const auto csv = render_csv(t);
  CHECK(csv.find("BoolQ,hi,78.89,84.07,+5.18") != std::string::npos);
  CHECK(csv.find("ARC-E,en,95.45,94.82,-0.63") != std::string::npos);

  const auto same = compare_runs(base, base);
  for (const auto& r : same.rows) CHECK(r.delta() == 0.0);
  CHECK(render_markdown(same).find("▲") == std::string::npos);

  auto fewer = cand;
  fewer.erase({"MMLU", Language::Hi});
  CHECK_THROWS_AS(compare_runs(base, fewer), DataError);
}

TEST_CASE("delta markers") {
  CHECK(delta_marker(5.18) == "▲ 5.18");
  CHECK(delta_marker(-0.63) == "▼ 0.63");
  CHECK(delta_marker(-0.001) == "0.00");
  CHECK(signed_delta(-0.63) == "-0.63");
  CHECK(signed_delta(0.0) == "0.00");
}

TEST_CASE("domain breakdown") {
  std::vector<PredictionRecord> base, cand;
  std::map<std::string, std::string> coverage;
  std::vector<std::string> order;
  for (const auto& r : published::domain_table()) {
    testing::append_domain_log(base, r.domain, r.qwen);
    testing::append_domain_log(cand, r.domain, r.our_qwen);
    coverage[r.domain] = r.coverage;
    order.push_back(r.domain);
  }
  const auto t = domain_breakdown(base, cand, coverage, order);
  REQUIRE(t.rows.size() == 14);
  std::size_t items = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& want = published::domain_table()[i];
    CHECK(t.rows[i].domain == want.domain);
    CHECK(std::abs(t.rows[i].delta() - want.qwen_change) <= 0.01);
    items += t.rows[i].baseline_items;
  }
  CHECK(items == base.size());
  const auto md = render_markdown(t);
  CHECK(md.find("| Health | 60.39 | 65.65 | ▲ 5.26 | Yes |") != std::string::npos);
  CHECK(render_csv(t).find("Economics,10000,10000,66.71,66.47,-0.24,No") != std::string::npos);
}

TEST_CASE("domain breakdown edge cases") {
  std::vector<PredictionRecord> one{{"a", 0, 4, std::nullopt, 0, std::nullopt, std::nullopt},
                                    {"b", 1, 4, std::nullopt, 0, std::nullopt, std::nullopt}};
  const auto t = domain_breakdown(one, one);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].domain == "Other");
  CHECK(t.rows[0].baseline == 50.0);

  auto no_gold = one;
  no_gold[0].gold_index.reset();
  CHECK_THROWS_AS(domain_breakdown(no_gold, one), DataError);
  auto other_domain = one;
  other_domain[0].domain = "Math";
  CHECK_THROWS_AS(domain_breakdown(one, other_domain), DataError);
}

TEST_CASE("prediction records") {
  PredictionRecord r{"x", 2, 10, std::string("Law"), 3, std::string("MMLU"), Language::Hi};
  CHECK(prediction_from_json(to_json(r)) == r);
  const auto minimal = prediction_from_json(nlohmann::json{{"id", "y"}, {"predicted_index", 0}, {"n_options", 4}});
  CHECK_FALSE(minimal.domain);
  CHECK_THROWS_AS(prediction_from_json(nlohmann::json{{"id", "y"}}), DataError);
}

TEST_CASE("sweep grid") {
  const std::vector<std::string> one{"qwen14b"};
  const auto ratios = parse_ratio_list("10..100");
  CHECK(ratios == std::vector<int>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  const auto grid = sweep_grid(one, ratios, parse_domain_flags("both"));
  REQUIRE(grid.size() == 20);
  CHECK(grid[0] == SweepConfig{"qwen14b", false, 10, 0.08});
  CHECK(grid[19] == SweepConfig{"qwen14b", true, 100, 0.08});

  const std::vector<std::string> seven{"a", "b", "c", "d", "e", "f", "g"};
  CHECK(sweep_grid(seven, ratios, {false, true}).size() == 140);
  CHECK(sweep_grid(one, std::vector<int>{}, {false, true}).empty());

  CHECK(parse_ratio_list("10..30:5") == std::vector<int>{10, 15, 20, 25, 30});
  CHECK(parse_ratio_list("20,50") == std::vector<int>{20, 50});
  CHECK(parse_ratio_list("").empty());
  CHECK_THROWS_AS(parse_ratio_list("10..x"), UsageError);
  CHECK_THROWS_AS(parse_ratio_list("120"), UsageError);
  CHECK_THROWS_AS(parse_domain_flags("maybe"), UsageError);
}
