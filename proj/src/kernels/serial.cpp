#include "bhasha/bias.hpp"
#include "bhasha/evaluator.hpp"
#include "bhasha/kernels.hpp"

namespace bhasha::kernels::serial {

std::vector<std::string> preprocess_all(std::span<const std::string> texts) {
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(preprocess(t));
  return out;
}

std::vector<FormattedSample> format_all(std::span<const Sample> samples) {
  std::vector<FormattedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(format_input(s));
  return out;
}

std::vector<std::uint64_t> lengths(std::span<const FormattedSample> samples, LengthMode mode,
                                   TokenCounter* counter) {
  std::vector<std::uint64_t> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(length_of(s, mode, counter));
  return out;
}

std::vector<ItemScore> score_all(std::span<const BenchmarkItem> items, ScoringClient& client,
                                 const EvalOptions& opts) {
  std::vector<ItemScore> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(score_item(item, client, opts));
  return out;
}

ChoiceDistribution choice_counts(std::span<const Prediction> predictions) {
  ChoiceDistribution d;
  for (const auto& p : predictions) d.add(p.predicted_index, p.n_options);
  return d;
}

}  // namespace bhasha::kernels::serial
