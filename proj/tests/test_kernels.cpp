#include "doctest.h"

#include <omp.h>

#include "bhasha/bias.hpp"
#include "bhasha/evaluator.hpp"
#include "bhasha/kernels.hpp"
#include "support.hpp"

using namespace bhasha;
namespace serial = bhasha::kernels::serial;
namespace parallel = bhasha::kernels::parallel;

namespace {

struct Threads {
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
  int saved;
};

// Counts through the mock backend; safe for concurrent use.
class MockCounter final : public TokenCounter {
 public:
  std::uint64_t count_tokens(std::string_view text) override {
    return mock_.tokenize({"", std::string(text)});
  }

 private:
  MockBackend mock_{1};
};

}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
  Threads threads(4);
  std::mt19937_64 rng(31);

  std::vector<std::string> texts;
  for (int i = 0; i < 3000; ++i) texts.push_back(testing::random_text(rng));
  CHECK(parallel::preprocess_all(texts) == serial::preprocess_all(texts));

  std::vector<Sample> samples;
  for (std::size_t i = 0; i < 3000; ++i) samples.push_back(testing::random_sample(rng, i));
  const auto formatted = serial::format_all(samples);
  CHECK(parallel::format_all(samples) == formatted);

  MockCounter counter;
  for (auto mode : {LengthMode::WhitespaceTokens, LengthMode::Bytes, LengthMode::TokenCountViaBackend})
    CHECK(parallel::lengths(formatted, mode, &counter) == serial::lengths(formatted, mode, &counter));

  std::vector<Prediction> preds;
  for (int i = 0; i < 20'000; ++i) {
    const int n = 2 + static_cast<int>(rng() % 9);
    preds.push_back({static_cast<int>(rng() % static_cast<std::uint64_t>(n)), n});
  }
  const auto pc = parallel::choice_counts(preds);
  const auto sc = serial::choice_counts(preds);
  CHECK(pc.counts == sc.counts);
  CHECK(pc.availability == sc.availability);
  CHECK(pc.items_by_options == sc.items_by_options);
  CHECK(kernels::max_threads() >= 1);
}

TEST_CASE("parallel scoring matches serial scoring") {
  Threads threads(4);
  std::vector<BenchmarkItem> items;
  for (int i = 0; i < 500; ++i)
    items.push_back({"q" + std::to_string(i), i % 2 ? "BoolQ" : "MMLU", "question " + std::to_string(i),
                     std::nullopt, i % 2 ? std::vector<std::string>{"Yes", "No"}
                                         : std::vector<std::string>{"a", "b c", "d", "e f g"},
                     0, i % 3 ? Language::En : Language::Hi, std::nullopt});
  MockBackend mock(1024);
  ScoringClient client(mock);
  EvalOptions opts;
  const auto a = parallel::score_all(items, client, opts);
  const auto b = serial::score_all(items, client, opts);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].predicted_index == b[i].predicted_index);
    CHECK(a[i].normalized == b[i].normalized);
  }
}

TEST_CASE("errors inside parallel regions reach the caller") {
  Threads threads(4);
  std::vector<Sample> samples(100);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].id = std::to_string(i);
    samples[i].input_fields = {"x"};
  }
  samples[57].task = TaskType::Translation;
  CHECK_THROWS_AS(parallel::format_all(samples), TemplateError);

  std::vector<Prediction> preds(1000, Prediction{0, 4});
  preds[999] = {7, 4};
  CHECK_THROWS_AS(parallel::choice_counts(preds), DataError);

  std::vector<FormattedSample> f(10);
  CHECK_THROWS_AS(parallel::lengths(f, LengthMode::TokenCountViaBackend, nullptr), UsageError);
}
