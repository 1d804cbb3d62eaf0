#include "bhasha/orderer.hpp"

#include <algorithm>

namespace bhasha {

std::string_view to_string(LengthMode mode) {
  switch (mode) {
    case LengthMode::TokenCountViaBackend: return "backend";
    case LengthMode::WhitespaceTokens: return "ws";
    case LengthMode::Bytes: return "bytes";
  }
  return "?";
}

LengthMode parse_length_mode(std::string_view text) {
  if (text == "backend" || text == "tokens") return LengthMode::TokenCountViaBackend;
  if (text == "ws" || text == "whitespace") return LengthMode::WhitespaceTokens;
  if (text == "bytes") return LengthMode::Bytes;
  throw UsageError("unknown length mode '" + std::string(text) + "'");
}

int effective_batch_size(int batch, int grad_accum) {
  if (batch < 1 || grad_accum < 1) throw UsageError("batch size and accumulation must be >= 1");
  return batch * grad_accum;
}

std::uint64_t whitespace_token_count(std::string_view text) {
  std::uint64_t n = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    if (!ws && !in_token) ++n;
    in_token = !ws;
  }
  return n;
}

std::uint64_t length_of(const FormattedSample& s, LengthMode mode, TokenCounter* counter) {
  switch (mode) {
    case LengthMode::Bytes: return s.prompt.size();
    case LengthMode::WhitespaceTokens: return whitespace_token_count(s.prompt);
    case LengthMode::TokenCountViaBackend:
      if (!counter) throw UsageError("length mode 'backend' needs a scoring backend");
      return counter->count_tokens(s.prompt);
  }
  return 0;
}

std::vector<std::size_t> cultural_slots(std::size_t body_size, std::size_t cultural_count) {
  std::vector<std::size_t> slots;
  slots.reserve(cultural_count);
  for (std::size_t j = 0; j < cultural_count; ++j)
    slots.push_back(static_cast<std::size_t>(static_cast<unsigned __int128>(j) * body_size /
                                             cultural_count));
  return slots;
}

std::vector<OrderedEntry> order(std::vector<OrderEntry> entries, std::size_t effective_batch) {
  if (effective_batch == 0) throw UsageError("effective batch size must be >= 1");
  const std::size_t n = entries.size();
  const std::size_t head = std::min(effective_batch, n);

  std::sort(entries.begin(), entries.end(), [](const OrderEntry& a, const OrderEntry& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.sample.id < b.sample.id;
  });

  std::vector<OrderedEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < head; ++i) out.push_back({std::move(entries[i]), i, Block::Head});

  std::vector<OrderEntry> regular, cultural;
  for (std::size_t i = head; i < n; ++i)
    (entries[i].is_cultural ? cultural : regular).push_back(std::move(entries[i]));
  auto ascending = [](const OrderEntry& a, const OrderEntry& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.sample.id < b.sample.id;
  };
  std::sort(regular.begin(), regular.end(), ascending);
  std::sort(cultural.begin(), cultural.end(), ascending);

  const std::size_t body = n - head;
  const auto slots = cultural_slots(body, cultural.size());
  std::size_t next_slot = 0, next_regular = 0, next_cultural = 0;
  for (std::size_t k = 0; k < body; ++k) {
    const bool take_cultural = next_slot < slots.size() && slots[next_slot] == k;
    OrderEntry& e = take_cultural ? cultural[next_cultural++] : regular[next_regular++];
    if (take_cultural) ++next_slot;
    out.push_back({std::move(e), head + k, Block::Body});
  }
  return out;
}

nlohmann::json to_json(const OrderedEntry& e) {
  auto j = to_json(e.entry.sample);
  j["position"] = e.position;
  j["length"] = e.entry.length;
  j["block"] = e.block == Block::Head ? "head" : "body";
  return j;
}

}  // namespace bhasha
