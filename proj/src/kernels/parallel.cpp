#include <omp.h>

#include <exception>
#include <mutex>

#include "bhasha/bias.hpp"
#include "bhasha/evaluator.hpp"
#include "bhasha/kernels.hpp"

namespace bhasha::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace {

// Keeps the first exception thrown by any iteration of a parallel loop.
class FirstError {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr error_;
};

template <typename Out, typename In, typename F>
std::vector<Out> parallel_map(std::span<const In> in, F&& f, bool dynamic = false) {
  std::vector<Out> out(in.size());
  FirstError err;
  const auto n = static_cast<std::int64_t>(in.size());
  if (dynamic) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) err.run([&] { out[i] = f(in[i]); });
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) err.run([&] { out[i] = f(in[i]); });
  }
  err.rethrow();
  return out;
}

}  // namespace

namespace parallel {

std::vector<std::string> preprocess_all(std::span<const std::string> texts) {
  return parallel_map<std::string>(texts, [](const std::string& t) { return preprocess(t); });
}

std::vector<FormattedSample> format_all(std::span<const Sample> samples) {
  return parallel_map<FormattedSample>(samples, [](const Sample& s) { return format_input(s); });
}

std::vector<std::uint64_t> lengths(std::span<const FormattedSample> samples, LengthMode mode,
                                   TokenCounter* counter) {
  // Backend counting is I/O bound and uneven; local modes are uniform.
  return parallel_map<std::uint64_t>(
      samples, [&](const FormattedSample& s) { return length_of(s, mode, counter); },
      mode == LengthMode::TokenCountViaBackend);
}

std::vector<ItemScore> score_all(std::span<const BenchmarkItem> items, ScoringClient& client,
                                 const EvalOptions& opts) {
  return parallel_map<ItemScore>(
      items, [&](const BenchmarkItem& item) { return score_item(item, client, opts); }, true);
}

ChoiceDistribution choice_counts(std::span<const Prediction> predictions) {
  ChoiceDistribution total;
  FirstError err;
  const auto n = static_cast<std::int64_t>(predictions.size());
#pragma omp parallel
  {
    ChoiceDistribution local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i)
      err.run([&] { local.add(predictions[i].predicted_index, predictions[i].n_options); });
#pragma omp critical(bhasha_choice_merge)
    total.merge(local);
  }
  err.rethrow();
  return total;
}

}  // namespace parallel
}  // namespace bhasha::kernels
