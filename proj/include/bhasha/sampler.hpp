#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bhasha/corpus_model.hpp"

namespace bhasha {

struct SamplingPlan {
  std::string source;
  std::uint64_t hindi_count = 0;
  std::uint64_t english_count = 0;
  bool take_all = false;

  bool operator==(const SamplingPlan&) const = default;
};

// Hindi count is floor(used * ratio / 100); the remainder goes to English.
SamplingPlan plan_from_spec(const DatasetSpec& spec);

struct ShortageError : DataError {
  ShortageError(std::string source, Language language, std::uint64_t deficit);
  std::string source;
  Language language;
  std::uint64_t deficit;
};

// Selects exactly the planned count per language, uniformly without
// replacement. Rows are partitioned by language in input order; a single
// xoshiro256** stream seeded with `seed` runs a partial Fisher-Yates shuffle
// over the Hindi partition and then the English one. Selected rows are
// returned in their original input order.
std::vector<Sample> draw(std::span<const Sample> rows, const SamplingPlan& plan,
                         std::uint64_t seed);

inline constexpr std::uint64_t kStatedUsedTotal = 485'469;
inline constexpr std::uint64_t kStatedCollectedTotal = 3'117'450;

struct CorpusReportRow {
  DatasetSpec spec;
  SamplingPlan plan;
  std::vector<std::string> warnings;
};

struct CorpusReport {
  std::vector<CorpusReportRow> rows;
  std::uint64_t computed_used_sum = 0;
  std::uint64_t computed_total_sum = 0;
  std::uint64_t stated_used_total = kStatedUsedTotal;
  std::uint64_t stated_collected_total = kStatedCollectedTotal;

  bool used_sum_matches() const { return computed_used_sum == stated_used_total; }
  std::size_t warning_count() const;
  std::string to_text() const;
  nlohmann::json to_json() const;
};

CorpusReport validate_corpus(std::span<const DatasetSpec> specs);

struct CurationResult {
  std::vector<Sample> samples;  // manifest order, each dataset in input order
  std::vector<std::string> warnings;
};

// Draws every manifest dataset from `rows` (grouped by their `source` field)
// with the same seed. Rows whose source is not in the manifest are ignored
// with a warning.
CurationResult curate(std::span<const DatasetSpec> specs, std::span<const Sample> rows,
                      std::uint64_t seed);

// Manifest: CSV with a header row naming at least source, total, used and
// hindi_ratio (an optional domain column is kept). Ratio cells "N/A", "*" or
// empty mean "take all". Digit-group separators ("51,210" in quotes, or
// "51_210") are accepted in count cells.
std::vector<DatasetSpec> parse_manifest(std::string_view text);
std::vector<DatasetSpec> load_manifest(const std::filesystem::path& path);
std::string format_manifest(std::span<const DatasetSpec> specs);

// The full source table the curation run was built from.
std::vector<DatasetSpec> reference_manifest();

}  // namespace bhasha
