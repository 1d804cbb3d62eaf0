#pragma once

// Shared domain types for the curation pipeline and the evaluation harness.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace bhasha {

// Error categories. Each maps onto a distinct CLI exit code (see cli.hpp).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Language { En, Hi };

std::string_view to_string(Language lang);
Language parse_language(std::string_view text);
// Human-readable name used inside "TRANSLATION [..]" tags.
std::string_view display_name(Language lang);

enum class TaskType {
  NLI,
  MCQ,
  Numeric,
  Boolean,
  LongResponse,
  DirectResponse,
  Code,
  Summarize,
  Paraphrase,
  Translation,
  Simplify,
};

inline constexpr int kTaskTypeCount = 11;
const std::vector<TaskType>& all_task_types();

// Serialized name ("NLI", "MCQ", "NUMERIC", ...), identical to the template keyword
// except for TRANSLATION which carries its target language separately.
std::string_view task_name(TaskType task);
TaskType parse_task(std::string_view text);

inline constexpr std::size_t kMinOptions = 2;
inline constexpr std::size_t kMaxOptions = 10;

struct Sample {
  std::string id;
  TaskType task = TaskType::DirectResponse;
  // NLI: {text1, text2}. Translation: {input, target language name}.
  // Every other task: {input}.
  std::vector<std::string> input_fields;
  std::vector<std::string> options;  // MCQ only
  std::string output;
  Language language = Language::En;
  std::string domain;
  std::string source;
  bool is_cultural = false;

  bool operator==(const Sample&) const = default;
};

// The five localized/cultural sources.
const std::vector<std::string>& cultural_sources();
bool is_cultural_source(std::string_view source);

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

ValidationReport validate_sample(const Sample& s);

nlohmann::json to_json(const Sample& s);
Sample sample_from_json(const nlohmann::json& j);
// One compact JSON object, keys in lexicographic order, no trailing newline.
std::string serialize(const Sample& s);
Sample parse_sample(std::string_view line);

struct DatasetSpec {
  std::string domain;
  std::string source;
  std::uint64_t total_samples = 0;
  std::uint64_t used_samples = 0;
  // Absent means "take all rows as-is" (N/A or mixed-language sources).
  std::optional<double> hindi_ratio;

  bool operator==(const DatasetSpec&) const = default;
};

struct SpecWarning {
  std::string source;
  std::string message;
};

// Throws DataError on malformed ratios; returns warnings for soft issues
// (used > total).
std::vector<SpecWarning> validate_spec(const DatasetSpec& spec);

struct BenchmarkItem {
  std::string id;
  std::string benchmark;
  std::string question;
  std::optional<std::string> context;
  std::vector<std::string> choices;
  int gold_index = 0;
  Language language = Language::En;
  std::optional<std::string> domain;

  bool operator==(const BenchmarkItem&) const = default;
};

inline const std::vector<std::string>& core_benchmarks() {
  static const std::vector<std::string> names{"ARC-C", "ARC-E", "BoolQ", "CMCQ", "MMLU"};
  return names;
}

ValidationReport validate_item(const BenchmarkItem& item, bool is_boolean);

nlohmann::json to_json(const BenchmarkItem& item);
BenchmarkItem item_from_json(const nlohmann::json& j);

struct PipelineConfig {
  std::uint64_t seed = 1024;
  int batch_size = 40;
  int grad_accum = 15;
  // Recorded as run metadata only.
  int epochs = 1;
  double learning_rate = 2e-5;
  double weight_decay = 1e-2;
  int warmup_steps = 0;

  int effective_batch_size() const;
};

}  // namespace bhasha
