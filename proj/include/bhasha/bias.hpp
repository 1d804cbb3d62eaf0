#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bhasha/evaluator.hpp"

namespace bhasha {

inline constexpr std::size_t kPositions = kMaxOptions;

// Histogram of predicted option positions A..J. Items with fewer than ten
// options only make their leading positions available, so the distribution is
// compared against an availability-weighted uniform baseline rather than a
// flat 1/10.
struct ChoiceDistribution {
  std::array<std::uint64_t, kPositions> counts{};
  std::array<std::uint64_t, kPositions> availability{};
  // items_by_options[n] = number of predictions over n-option items.
  std::array<std::uint64_t, kPositions + 1> items_by_options{};

  std::uint64_t total() const;
  std::array<double, kPositions> frequencies() const;
  // Each item spreads 1/n over its n available positions; normalized by items.
  std::array<double, kPositions> baseline() const;

  void add(int predicted_index, int n_options);
  ChoiceDistribution& merge(const ChoiceDistribution& other);

  bool operator==(const ChoiceDistribution&) const = default;
};

struct Prediction {
  int predicted_index = 0;
  int n_options = 0;
};

// Throws DataError unless 0 <= predicted_index < n_options <= 10.
ChoiceDistribution choice_distribution(std::span<const Prediction> predictions);
ChoiceDistribution choice_distribution(std::span<const PredictionRecord> records);

// Total-variation distance between observed frequencies and the baseline,
// in [0, 1]. Throws DataError on an empty distribution.
double bias_index(const ChoiceDistribution& d);

// Records without a domain go under "Other".
std::map<std::string, ChoiceDistribution> per_domain(std::span<const PredictionRecord> records);

struct DistributionSeries {
  std::string model;
  std::string domain;  // "all" for the global histogram
  ChoiceDistribution dist;
};

// model,domain,position,count,availability,frequency,baseline
std::string render_csv(std::span<const DistributionSeries> series);
// Grouped bar chart: one group per position, one bar per series.
std::string render_svg(std::span<const DistributionSeries> series, std::string_view title);

}  // namespace bhasha
