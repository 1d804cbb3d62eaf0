// Serial reference vs OpenMP kernels on synthetic input.

#include <benchmark/benchmark.h>

#include <random>

#include "bhasha/bias.hpp"
#include "bhasha/kernels.hpp"

using namespace bhasha;

namespace {

std::string text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{"word", "  ", "\"quoted\"", "नमस्ते", "भारत", "data", " ", "“x”"};
  std::string s;
  for (int i = 0, n = 4 + static_cast<int>(rng() % 40); i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

const std::vector<std::string>& texts() {
  static const auto v = [] {
    std::mt19937_64 rng(1);
    std::vector<std::string> out;
    for (int i = 0; i < 20'000; ++i) out.push_back(text(rng));
    return out;
  }();
  return v;
}

const std::vector<Sample>& samples() {
  static const auto v = [] {
    std::mt19937_64 rng(2);
    std::vector<Sample> out;
    for (int i = 0; i < 20'000; ++i) {
      Sample s;
      s.id = "s" + std::to_string(i);
      s.task = i % 3 ? TaskType::DirectResponse : TaskType::MCQ;
      s.input_fields = {text(rng)};
      if (s.task == TaskType::MCQ) s.options = {text(rng), text(rng), text(rng), text(rng)};
      s.output = text(rng);
      out.push_back(std::move(s));
    }
    return out;
  }();
  return v;
}

const std::vector<Prediction>& predictions() {
  static const auto v = [] {
    std::mt19937_64 rng(3);
    std::vector<Prediction> out;
    for (int i = 0; i < 1'000'000; ++i) {
      const int n = 2 + static_cast<int>(rng() % 9);
      out.push_back({static_cast<int>(rng() % static_cast<std::uint64_t>(n)), n});
    }
    return out;
  }();
  return v;
}

template <auto Fn>
void preprocess_bench(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(texts()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(texts().size()));
}

template <auto Fn>
void format_bench(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(samples()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples().size()));
}

template <auto Fn>
void choice_bench(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(predictions()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(predictions().size()));
}

}  // namespace

BENCHMARK(preprocess_bench<kernels::serial::preprocess_all>)->Name("preprocess/serial");
BENCHMARK(preprocess_bench<kernels::parallel::preprocess_all>)->Name("preprocess/parallel");
BENCHMARK(format_bench<kernels::serial::format_all>)->Name("format/serial");
BENCHMARK(format_bench<kernels::parallel::format_all>)->Name("format/parallel");
BENCHMARK(choice_bench<kernels::serial::choice_counts>)->Name("choice_counts/serial");
BENCHMARK(choice_bench<kernels::parallel::choice_counts>)->Name("choice_counts/parallel");

BENCHMARK_MAIN();
