#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bhasha/corpus_model.hpp"
#include "bhasha/orderer.hpp"

namespace testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(BHASHA_SOURCE_DIR) / rel;
}

inline nlohmann::json load_json(const std::string& rel) {
  std::ifstream in(source_path(rel));
  return nlohmann::json::parse(in);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("bhasha_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Strings drawn from a small alphabet that stresses preprocessing: runs of
// spaces, ASCII and typographic double quotes, tabs, newlines and Devanagari.
inline std::string random_text(std::mt19937_64& rng, std::size_t max_pieces = 24) {
  static const std::vector<std::string> pieces{
      " ", " ", "  ", "   ", "a", "b", "Z", "7", "\"", "“", "”", "'", "\t", "\n", ",", "###",
      "न", "दी", "हाँ", "क्ष", "ि", "।", "é", "😀", "x y", "\"q\""};
  std::uniform_int_distribution<std::size_t> len(0, max_pieces);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string out;
  for (std::size_t i = len(rng); i > 0; --i) out += pieces[pick(rng)];
  return out;
}

// Short non-blank text with no separator sequences.
inline std::string random_words(std::mt19937_64& rng, std::size_t max_words = 8) {
  static const std::vector<std::string> words{"river", "lamp", "नदी", "पुल", "seven", "“quoted”",
                                              "x", "मसाला", "Q?", "a-b"};
  std::uniform_int_distribution<std::size_t> len(1, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::string out;
  for (std::size_t i = len(rng); i > 0; --i) {
    if (!out.empty()) out += ' ';
    out += words[pick(rng)];
  }
  return out;
}

inline bhasha::Sample random_sample(std::mt19937_64& rng, std::size_t index) {
  using namespace bhasha;
  const auto& tasks = all_task_types();
  Sample s;
  s.id = "s" + std::to_string(index);
  s.task = tasks[std::uniform_int_distribution<std::size_t>(0, tasks.size() - 1)(rng)];
  s.language = rng() % 2 ? Language::Hi : Language::En;
  s.input_fields = {random_words(rng)};
  if (s.task == TaskType::NLI) s.input_fields.push_back(random_words(rng));
  if (s.task == TaskType::Translation) s.input_fields.push_back(rng() % 2 ? "Hindi" : "English");
  if (s.task == TaskType::MCQ) {
    const auto n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    for (std::size_t i = 0; i < n; ++i) s.options.push_back(random_words(rng, 3));
  }
  s.output = random_words(rng);
  static const std::vector<std::string> sources{"Alpaca", "GSM8K", "India Law", "India UPSC", "XNLI"};
  s.source = sources[rng() % sources.size()];
  s.is_cultural = is_cultural_source(s.source);
  s.domain = "General";
  return s;
}

// Independent checker for the ordering rules. Returns a list of failures.
// With `exact_slots` the cultural positions must be the ones floor(j*R/k) and
// the cultural entries must themselves run in ascending (length, id) order,
// which pins the output down completely.
inline std::vector<std::string> check_order(const std::vector<bhasha::OrderEntry>& input,
                                            const std::vector<bhasha::OrderEntry>& output,
                                            std::size_t e, bool exact_slots) {
  std::vector<std::string> failures;
  auto fail = [&](const std::string& f) {
    if (failures.size() < 10) failures.push_back(f);
  };
  const std::size_t n = input.size();

  std::multiset<std::string> in_ids, out_ids;
  for (const auto& x : input) in_ids.insert(x.sample.id);
  for (const auto& x : output) out_ids.insert(x.sample.id);
  if (in_ids != out_ids) fail("output is not a permutation of the input");
  if (output.size() != n) return failures;

  // (length desc, id asc) rank: number of inputs that beat a given entry.
  auto beats = [](const bhasha::OrderEntry& a, const bhasha::OrderEntry& b) {
    return a.length > b.length || (a.length == b.length && a.sample.id < b.sample.id);
  };
  const std::size_t h = std::min(e, n);
  for (std::size_t i = 0; i < h; ++i) {
    std::size_t better = 0;
    for (const auto& x : input) better += beats(x, output[i]);
    if (better != i) fail("head position " + std::to_string(i) + " holds rank " + std::to_string(better));
  }
  std::uint64_t head_min = UINT64_MAX, body_max = 0;
  for (std::size_t i = 0; i < h; ++i) head_min = std::min(head_min, output[i].length);
  for (std::size_t i = h; i < n; ++i) body_max = std::max(body_max, output[i].length);
  if (h < n && head_min < body_max) fail("head block is not maximal");

  std::vector<std::size_t> cultural_pos;
  const bhasha::OrderEntry* prev = nullptr;
  const bhasha::OrderEntry* prev_cultural = nullptr;
  for (std::size_t i = h; i < n; ++i) {
    const auto& x = output[i];
    if (x.is_cultural) {
      cultural_pos.push_back(i - h);
      if (exact_slots && prev_cultural &&
          (prev_cultural->length > x.length ||
           (prev_cultural->length == x.length && prev_cultural->sample.id > x.sample.id)))
        fail("cultural entries out of order at " + std::to_string(i));
      prev_cultural = &x;
      continue;
    }
    if (prev && (prev->length > x.length || (prev->length == x.length && prev->sample.id > x.sample.id)))
      fail("body not ascending at " + std::to_string(i));
    prev = &x;
  }

  const std::size_t r = n - h, k = cultural_pos.size();
  if (k > 1) {
    const double stride = static_cast<double>(r) / static_cast<double>(k);
    for (std::size_t j = 1; j < k; ++j) {
      const double gap = static_cast<double>(cultural_pos[j] - cultural_pos[j - 1]);
      if (std::abs(gap - stride) > 1.0) fail("cultural gap " + std::to_string(gap) + " vs stride");
    }
  }
  if (exact_slots)
    for (std::size_t j = 0; j < k; ++j)
      if (cultural_pos[j] != j * r / k) fail("cultural slot " + std::to_string(j) + " misplaced");
  return failures;
}

inline std::vector<bhasha::OrderEntry> strip(const std::vector<bhasha::OrderedEntry>& v) {
  std::vector<bhasha::OrderEntry> out;
  for (const auto& x : v) out.push_back(x.entry);
  return out;
}

inline std::vector<bhasha::OrderEntry> synthetic_entries(std::mt19937_64& rng, std::size_t n,
                                                         double cultural_share, std::uint64_t max_len) {
  std::vector<bhasha::OrderEntry> v;
  std::uniform_int_distribution<std::uint64_t> len(1, max_len);
  std::bernoulli_distribution cultural(cultural_share);
  for (std::size_t i = 0; i < n; ++i) {
    bhasha::OrderEntry e;
    char id[16];
    std::snprintf(id, sizeof id, "x%06zu", (i * 7919) % n);
    e.sample.id = id;
    e.is_cultural = cultural(rng);
    e.length = len(rng);
    v.push_back(std::move(e));
  }
  return v;
}

}  // namespace testing
