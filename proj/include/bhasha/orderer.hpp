#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bhasha/textprep.hpp"

namespace bhasha {

enum class LengthMode { TokenCountViaBackend, WhitespaceTokens, Bytes };

std::string_view to_string(LengthMode mode);
LengthMode parse_length_mode(std::string_view text);

struct OrderingConfig {
  std::size_t effective_batch_size = 600;
  LengthMode length_mode = LengthMode::WhitespaceTokens;
};

int effective_batch_size(int batch, int grad_accum);

class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::uint64_t count_tokens(std::string_view text) = 0;
};

std::uint64_t whitespace_token_count(std::string_view text);

// Throws UsageError when the mode needs a backend counter and none is given.
std::uint64_t length_of(const FormattedSample& s, LengthMode mode, TokenCounter* counter);

struct OrderEntry {
  FormattedSample sample;
  bool is_cultural = false;
  std::uint64_t length = 0;
};

enum class Block { Head, Body };

struct OrderedEntry {
  OrderEntry entry;
  std::size_t position = 0;
  Block block = Block::Body;
};

// Longest min(E, N) entries first, descending by length; the rest ascending
// by length with cultural entries spread evenly over that region. All ties
// break on id ascending. The head block never receives interleaved entries.
std::vector<OrderedEntry> order(std::vector<OrderEntry> entries, std::size_t effective_batch);

// Slot indices (relative to the body start) that cultural entries occupy:
// floor(j * body / cultural) for j in [0, cultural).
std::vector<std::size_t> cultural_slots(std::size_t body_size, std::size_t cultural_count);

nlohmann::json to_json(const OrderedEntry& e);

}  // namespace bhasha
