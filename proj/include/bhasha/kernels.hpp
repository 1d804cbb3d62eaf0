#pragma once

// Data-parallel inner loops of the pipeline. Every kernel exists twice: a
// plain serial reference kept for testing and an OpenMP version used by the
// pipeline. Both must produce identical output for identical input; the
// kernel tests and bench/bench_kernels compare them.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bhasha/corpus_model.hpp"
#include "bhasha/orderer.hpp"
#include "bhasha/textprep.hpp"

namespace bhasha {

struct EvalOptions;
struct ItemScore;
struct Prediction;
struct ChoiceDistribution;
class ScoringClient;

namespace kernels {

namespace serial {

std::vector<std::string> preprocess_all(std::span<const std::string> texts);
std::vector<FormattedSample> format_all(std::span<const Sample> samples);
std::vector<std::uint64_t> lengths(std::span<const FormattedSample> samples, LengthMode mode,
                                   TokenCounter* counter);
std::vector<ItemScore> score_all(std::span<const BenchmarkItem> items, ScoringClient& client,
                                 const EvalOptions& opts);
ChoiceDistribution choice_counts(std::span<const Prediction> predictions);

}  // namespace serial

namespace parallel {

// The first exception raised inside a parallel region is rethrown after the
// region ends. `counter` must be safe for concurrent use.
std::vector<std::string> preprocess_all(std::span<const std::string> texts);
std::vector<FormattedSample> format_all(std::span<const Sample> samples);
std::vector<std::uint64_t> lengths(std::span<const FormattedSample> samples, LengthMode mode,
                                   TokenCounter* counter);
std::vector<ItemScore> score_all(std::span<const BenchmarkItem> items, ScoringClient& client,
                                 const EvalOptions& opts);
ChoiceDistribution choice_counts(std::span<const Prediction> predictions);

}  // namespace parallel

int max_threads();

}  // namespace kernels
}  // namespace bhasha
