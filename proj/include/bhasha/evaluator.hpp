#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bhasha/scoring.hpp"
#include "bhasha/textprep.hpp"

namespace bhasha {

enum class NormalizationMode { MeanPerToken, Unnormalized, ByteLengthNormalized };
enum class TargetStyle { ChoiceText, ChoiceLetter };

std::string_view to_string(NormalizationMode mode);
NormalizationMode parse_norm(std::string_view text);
std::string_view to_string(TargetStyle style);
TargetStyle parse_target_style(std::string_view text);

struct EvalOptions {
  std::string model;
  NormalizationMode norm = NormalizationMode::MeanPerToken;
  TargetStyle target = TargetStyle::ChoiceText;
  std::set<std::string> boolean_benchmarks{"BoolQ"};
  // Continuations scored for boolean items, index-aligned with the item's two
  // choices. Keyed by benchmark then language; the "*" benchmark is the
  // fallback.
  std::map<std::string, std::map<Language, std::vector<std::string>>> boolean_answers{
      {"*", {{Language::En, {"Yes", "No"}}, {Language::Hi, {"हाँ", "नहीं"}}}}};
  ChatTemplate chat = ChatTemplate::identity();

  bool is_boolean(const BenchmarkItem& item) const { return boolean_benchmarks.count(item.benchmark) > 0; }
  const std::vector<std::string>& boolean_continuations(const std::string& benchmark,
                                                        Language lang) const;
};

// Normalized score of one continuation. `bytes` is the continuation's byte
// length (only used by ByteLengthNormalized).
double normalize_score(const ContinuationScore& raw, std::size_t bytes, NormalizationMode mode);

// Index of the maximum; ties go to the lowest index. Empty input gives -1.
int argmax_lowest(std::span<const double> scores);

// Prompt text sent to the backend for an item (Table-1 MCQ/BOOLEAN template
// wrapped in the chat template).
std::string item_prompt(const BenchmarkItem& item, const EvalOptions& opts);
std::vector<std::string> item_continuations(const BenchmarkItem& item, const EvalOptions& opts);

struct ItemScore {
  std::string id;
  std::string benchmark;
  Language language = Language::En;
  std::optional<std::string> domain;
  int gold_index = 0;
  int n_options = 0;
  int predicted_index = -1;  // -1 while unscored
  std::vector<ContinuationScore> raw;
  std::vector<double> normalized;
  std::string error;  // set for unscored items

  bool scored() const { return predicted_index >= 0; }
  bool correct() const { return scored() && predicted_index == gold_index; }
};

// Backend failures are captured on the returned ItemScore, never thrown.
ItemScore score_item(const BenchmarkItem& item, ScoringClient& client, const EvalOptions& opts);

struct EvalResult {
  std::string benchmark;
  Language language = Language::En;
  std::size_t n_items = 0;  // scored items
  std::size_t n_correct = 0;
  std::size_t n_unscored = 0;
  double accuracy = 0.0;  // n_correct / n_items, in [0, 1]
  std::vector<ItemScore> per_item;  // scored items, sorted by id
  std::vector<ItemScore> unscored;  // sorted by id
};

struct EvalReport {
  std::string model;
  NormalizationMode norm = NormalizationMode::MeanPerToken;
  TargetStyle target = TargetStyle::ChoiceText;
  std::string backend;
  std::vector<EvalResult> results;  // sorted by (benchmark, language)

  std::size_t unscored() const;
  const EvalResult* find(std::string_view benchmark, Language lang) const;
};

// Groups scored items by (benchmark, language) with a fold over items sorted
// by id, so the result does not depend on input or completion order.
EvalReport aggregate(std::vector<ItemScore> scores, const EvalOptions& opts, std::string backend);

// Scores every item (in parallel) and aggregates. Throws DataError on an
// empty item list or invalid items.
EvalReport evaluate(std::span<const BenchmarkItem> items, ScoringClient& client,
                    const EvalOptions& opts);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
// benchmark,language,n_items,n_correct,n_unscored,accuracy
std::string to_csv(const EvalReport& report);

// --- score tables -------------------------------------------------------------

// Accuracies in percent keyed by (benchmark, language).
using ScoreKey = std::pair<std::string, Language>;
using ScoreTable = std::map<ScoreKey, double>;

ScoreTable score_table(const EvalReport& report);

// Mean of the five core benchmarks for one language. Throws DataError naming
// the first missing benchmark.
double average_scores(const std::map<std::string, double>& accuracies);
double average_scores(const ScoreTable& table, Language lang);
// Mean of the English and Hindi averages.
double overall_average(const ScoreTable& table);

struct AverageCheck {
  double computed = 0.0;
  double printed = 0.0;
  bool consistent = false;  // |computed - printed| <= tolerance
};

AverageCheck check_printed_average(std::span<const double> cells, double printed,
                                   double tolerance = 0.005);

struct DeltaRow {
  std::string benchmark;
  std::string language;  // "en", "hi" or "overall"
  double baseline = 0.0;
  double candidate = 0.0;
  double delta() const { return candidate - baseline; }
};

struct DeltaTable {
  std::string baseline_name;
  std::string candidate_name;
  std::vector<DeltaRow> rows;
  std::vector<DeltaRow> averages;  // per language, then overall; empty when core set is incomplete
};

// Throws DataError when the key sets differ.
DeltaTable compare_runs(const ScoreTable& baseline, const ScoreTable& candidate,
                        std::string baseline_name = "Baseline",
                        std::string candidate_name = "Candidate");

// "▲ 5.18" / "▼ 0.63" for markdown, "+5.18" / "-0.63" for CSV; a delta that
// rounds to zero is plain "0.00".
std::string delta_marker(double delta);
std::string signed_delta(double delta);

std::string render_markdown(const DeltaTable& table);
std::string render_csv(const DeltaTable& table);

// --- prediction logs and domain breakdown --------------------------------------

// One line of a prediction log. Logs from external harnesses need only id,
// predicted_index and n_options; domain and gold_index are optional.
struct PredictionRecord {
  std::string id;
  int predicted_index = 0;
  int n_options = 0;
  std::optional<std::string> domain;
  std::optional<int> gold_index;
  std::optional<std::string> benchmark;
  std::optional<Language> language;

  bool operator==(const PredictionRecord&) const = default;
};

nlohmann::json to_json(const PredictionRecord& r);
PredictionRecord prediction_from_json(const nlohmann::json& j);
std::vector<PredictionRecord> prediction_log(const EvalReport& report);

inline constexpr std::string_view kUnlabeledDomain = "Other";

struct DomainRow {
  std::string domain;
  std::size_t baseline_items = 0;
  std::size_t candidate_items = 0;
  double baseline = 0.0;  // percent
  double candidate = 0.0;
  std::string coverage;  // "Yes", "No", "N/A" or empty
  double delta() const { return candidate - baseline; }
};

struct DomainDeltaTable {
  std::vector<DomainRow> rows;
};

// Per-domain accuracy of two prediction logs. Records without a domain count
// under "Other"; records without a gold index are a DataError. Rows follow
// `row_order` first, remaining domains alphabetically.
DomainDeltaTable domain_breakdown(std::span<const PredictionRecord> baseline,
                                  std::span<const PredictionRecord> candidate,
                                  const std::map<std::string, std::string>& coverage = {},
                                  std::span<const std::string> row_order = {});

std::string render_markdown(const DomainDeltaTable& table, std::string_view baseline_name = "Original",
                            std::string_view candidate_name = "Ours");
std::string render_csv(const DomainDeltaTable& table);

// --- sweep grid ----------------------------------------------------------------

struct SweepConfig {
  std::string model;
  bool include_domain_data = false;
  int hindi_ratio = 0;
  double data_fraction = 0.08;

  bool operator==(const SweepConfig&) const = default;
};

// Cartesian product ordered by (model, flag, ratio), each in caller order.
std::vector<SweepConfig> sweep_grid(std::span<const std::string> models, std::span<const int> ratios,
                                    const std::vector<bool>& domain_flags, double data_fraction = 0.08);

// "10..100" (step 10), "10..100:5" or "10,20,50".
std::vector<int> parse_ratio_list(std::string_view text);
// "both" -> {false, true}; "yes"/"no".
std::vector<bool> parse_domain_flags(std::string_view text);

nlohmann::json to_json(const SweepConfig& c);

}  // namespace bhasha
