#include "doctest.h"

#include <algorithm>

#include "bhasha/orderer.hpp"
#include "support.hpp"

using namespace bhasha;

namespace {

OrderEntry entry(std::string id, std::uint64_t length, bool cultural = false) {
  OrderEntry e;
  e.sample.id = std::move(id);
  e.length = length;
  e.is_cultural = cultural;
  return e;
}

std::vector<std::string> ids(const std::vector<OrderedEntry>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.entry.sample.id);
  return out;
}

// Every permutation accepted by the strict checker; there must be exactly one.
std::vector<std::vector<std::string>> accepted_permutations(std::vector<OrderEntry> input, std::size_t e) {
  std::vector<std::vector<std::string>> accepted;
  auto perm = input;
  std::sort(perm.begin(), perm.end(), [](auto& a, auto& b) { return a.sample.id < b.sample.id; });
  do {
    if (testing::check_order(input, perm, e, true).empty()) {
      std::vector<std::string> v;
      for (const auto& x : perm) v.push_back(x.sample.id);
      accepted.push_back(v);
    }
  } while (std::next_permutation(perm.begin(), perm.end(),
                                 [](auto& a, auto& b) { return a.sample.id < b.sample.id; }));
  return accepted;
}

}  // namespace

TEST_CASE("effective batch size") {
  CHECK(effective_batch_size(40, 15) == 600);
  CHECK(effective_batch_size(1, 1) == 1);
  CHECK(effective_batch_size(7, 9) == 63);
  CHECK_THROWS_AS(effective_batch_size(0, 15), UsageError);
  CHECK_THROWS_AS(effective_batch_size(40, -1), UsageError);
}

TEST_CASE("length modes") {
  FormattedSample empty{"e", "", "", Language::En};
  CHECK(length_of(empty, LengthMode::Bytes, nullptr) == 0);
  FormattedSample abc{"a", "a b c", "", Language::En};
  CHECK(length_of(abc, LengthMode::WhitespaceTokens, nullptr) == 3);
  CHECK(length_of(abc, LengthMode::Bytes, nullptr) == 5);
  CHECK_THROWS_AS(length_of(abc, LengthMode::TokenCountViaBackend, nullptr), UsageError);
  CHECK(whitespace_token_count("  नदी \t पुल\n") == 2);
  CHECK(parse_length_mode("backend") == LengthMode::TokenCountViaBackend);
  CHECK(to_string(LengthMode::Bytes) == "bytes");
  CHECK_THROWS_AS(parse_length_mode("chars"), UsageError);
}

TEST_CASE("four samples, E = 2") {
  const std::vector<OrderEntry> in{entry("a", 1), entry("b", 5), entry("c", 3), entry("d", 4)};
  const auto out = order(in, 2);
  CHECK(ids(out) == std::vector<std::string>{"b", "d", "a", "c"});
  CHECK(out[0].block == Block::Head);
  CHECK(out[2].block == Block::Body);
  CHECK(out[3].position == 3);

  const auto accepted = accepted_permutations(in, 2);
  REQUIRE(accepted.size() == 1);
  CHECK(accepted[0] == ids(out));
}

TEST_CASE("brute force agrees on small mixed inputs") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 3 + rng() % 4;
    const std::size_t e = 1 + rng() % (n + 1);
    auto in = testing::synthetic_entries(rng, n, 0.4, 4);
    const auto accepted = accepted_permutations(in, e);
    REQUIRE(accepted.size() == 1);
    CHECK(accepted[0] == ids(order(in, e)));
  }
}

TEST_CASE("all cultural") {
  std::vector<OrderEntry> in;
  for (int i = 0; i < 9; ++i) in.push_back(entry("c" + std::to_string(i), (i * 5) % 7 + 1, true));
  const auto out = order(in, 3);
  CHECK(testing::check_order(in, testing::strip(out), 3, true).empty());
  for (std::size_t i = 4; i < out.size(); ++i) CHECK(out[i - 1].entry.length <= out[i].entry.length);
}

TEST_CASE("fewer samples than E") {
  const std::vector<OrderEntry> in{entry("a", 1), entry("b", 2, true)};
  const auto out = order(in, 600);
  CHECK(ids(out) == std::vector<std::string>{"b", "a"});
  for (const auto& x : out) CHECK(x.block == Block::Head);
}

TEST_CASE("cultural slots") {
  CHECK(cultural_slots(10, 0).empty());
  CHECK(cultural_slots(10, 3) == std::vector<std::size_t>{0, 3, 6});
  CHECK(cultural_slots(4, 4) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("properties on a synthetic corpus") {
  std::mt19937_64 rng(1024);
  auto in = testing::synthetic_entries(rng, 10'000, 0.2, 400);
  const auto out = order(in, 600);
  const auto failures = testing::check_order(in, testing::strip(out), 600, true);
  for (const auto& f : failures) CAPTURE(f);
  CHECK(failures.empty());

  std::vector<std::uint64_t> lengths;
  for (const auto& x : in) lengths.push_back(x.length);
  std::sort(lengths.rbegin(), lengths.rend());
  for (std::size_t i = 0; i < 600; ++i) CHECK(out[i].entry.length == lengths[i]);

  std::shuffle(in.begin(), in.end(), rng);
  CHECK(ids(order(in, 600)) == ids(out));
}

TEST_CASE("ordered entries serialize with position and block") {
  const auto out = order({entry("a", 2), entry("b", 1)}, 1);
  const auto j = to_json(out[1]);
  CHECK(j["id"] == "b");
  CHECK(j["position"] == 1);
  CHECK(j["block"] == "body");
  CHECK(j["length"] == 1);
}
