#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "dnaskew/codec.hpp"
#include "dnaskew/priority.hpp"

using namespace dnaskew;

namespace {

void check_ranking(const BitRanking& r, const std::vector<std::size_t>& files, const std::vector<std::size_t>& caps,
                   bool first_is_directory) {
  const std::size_t total = std::accumulate(caps.begin(), caps.end(), std::size_t{0});
  REQUIRE(r.total_bits() == total);
  // Bijection: every payload bit (files + padding) gets a distinct slot.
  std::vector<std::vector<bool>> used(caps.size());
  for (std::size_t c = 0; c < caps.size(); ++c) used[c].assign(caps[c], false);
  for (std::size_t b = 0; b < total; ++b) {
    const ClassSlot s = r.assignment(b);
    REQUIRE(s.class_rank >= 0);
    REQUIRE(static_cast<std::size_t>(s.class_rank) < caps.size());
    REQUIRE(s.position < caps[static_cast<std::size_t>(s.class_rank)]);
    REQUIRE_FALSE(used[static_cast<std::size_t>(s.class_rank)][s.position]);
    used[static_cast<std::size_t>(s.class_rank)][s.position] = true;
  }
  // Monotone within a file.
  std::size_t off = 0;
  for (std::size_t f = 0; f < files.size(); ++f) {
    int prev = 0;
    for (std::size_t i = 0; i < files[f]; ++i) {
      const int c = r.assignment(off + i).class_rank;
      REQUIRE(c >= prev);
      prev = c;
    }
    off += files[f];
  }
  // Proportional shares once the directory has been carved out.
  std::vector<std::size_t> remaining = caps;
  std::size_t first = 0;
  if (first_is_directory && !files.empty()) {
    first = 1;
    for (std::size_t c = 0; c < caps.size(); ++c) remaining[c] -= r.share(0, static_cast<int>(c));
  }
  const double file_total = static_cast<double>(std::accumulate(files.begin() + static_cast<long>(first), files.end(), std::size_t{0}));
  const double cap_total = static_cast<double>(std::accumulate(remaining.begin(), remaining.end(), std::size_t{0}));
  for (std::size_t f = first; f < files.size(); ++f) {
    for (std::size_t c = 0; c < caps.size(); ++c) {
      // Padding takes its proportional share as if it were a file.
      const double exact = static_cast<double>(remaining[c]) * static_cast<double>(files[f]) / cap_total;
      REQUIRE(std::abs(static_cast<double>(r.share(f, static_cast<int>(c))) - exact) < 1.0);
    }
  }
  (void)file_total;
}

}  // namespace

TEST_CASE("single file fills classes in order") {
  const std::vector<std::size_t> files = {8}, caps = {4, 4};
  const BitRanking r = rank_bits_positional(files, caps);
  for (std::size_t b = 0; b < 8; ++b) {
    CHECK(r.assignment(b).class_rank == (b < 4 ? 0 : 1));
  }
}

TEST_CASE("two files split each class 2:1") {
  const std::vector<std::size_t> files = {2000, 1000}, caps(10, 300);
  const BitRanking r = rank_bits_positional(files, caps);
  for (int c = 0; c < 10; ++c) {
    CHECK(r.share(0, c) == 200);
    CHECK(r.share(1, c) == 100);
  }
  check_ranking(r, files, caps, false);
}

TEST_CASE("random corpora keep bijection, monotonicity and proportionality") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 40; ++t) {
    std::vector<std::size_t> files(10);
    for (auto& f : files) f = 1 + rng() % 5000;
    const std::size_t need = std::accumulate(files.begin(), files.end(), std::size_t{0});
    std::vector<std::size_t> caps(2 + rng() % 20);
    std::size_t have = 0;
    for (auto& c : caps) have += (c = 1 + rng() % 4000);
    if (have < need) caps.back() += need - have;
    const bool dir = (t % 2) == 1;
    check_ranking(rank_bits_positional(files, caps, dir), files, caps, dir);
  }
}

TEST_CASE("directory goes entirely to the top classes") {
  const std::vector<std::size_t> files = {500, 3000, 1500}, caps = {400, 400, 400, 400, 400, 3000};
  const BitRanking r = rank_bits_positional(files, caps, true);
  CHECK(r.share(0, 0) == 400);
  CHECK(r.share(0, 1) == 100);
  for (int c = 2; c < 6; ++c) CHECK(r.share(0, c) == 0);
  check_ranking(r, files, caps, true);
}

TEST_CASE("over-capacity ranking names both totals") {
  const std::vector<std::size_t> files = {10, 10}, caps = {5, 5};
  try {
    (void)rank_bits_positional(files, caps);
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(e.requested_bits() == 20);
    CHECK(e.capacity_bits() == 10);
  }
}

TEST_CASE("oracle ranking orders by descending loss with index ties") {
  const std::vector<std::uint8_t> file = {0x12, 0x34};
  const auto constant = rank_bits_oracle(file, [](std::span<const std::uint8_t>) { return FlipLoss{false, 1.0}; });
  std::vector<std::size_t> ident(16);
  std::iota(ident.begin(), ident.end(), std::size_t{0});
  CHECK(constant == ident);

  // Loss decreases with the flipped position.
  auto decreasing = [&](std::span<const std::uint8_t> f) {
    for (std::size_t i = 0; i < 16; ++i) {
      if (codec::get_bit(f, i) != codec::get_bit(file, i)) return FlipLoss{false, 100.0 - static_cast<double>(i)};
    }
    return FlipLoss{};
  };
  CHECK(rank_bits_oracle(file, decreasing, 3) == ident);

  // Undecodable sorts above any finite loss.
  auto mixed = [&](std::span<const std::uint8_t> f) {
    if (codec::get_bit(f, 9) != codec::get_bit(file, 9)) return FlipLoss{true, 0.0};
    return FlipLoss{false, 5.0};
  };
  CHECK(rank_bits_oracle(file, mixed).front() == 9);
}

TEST_CASE("directory pack examples") {
  const std::vector<DirectoryEntry> none;
  CHECK(pack_directory(none) == std::vector<std::uint8_t>{0, 0});
  const std::vector<DirectoryEntry> one = {{"a.jpg", 5}};
  const auto bytes = pack_directory(one);
  const std::vector<std::uint8_t> expect = {0, 1, 0, 5, 'a', '.', 'j', 'p', 'g', 0, 0, 0, 0, 0, 0, 0, 5};
  CHECK(bytes == expect);
  CHECK(unpack_directory(bytes) == one);
}

TEST_CASE("directory fuzz round trip") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    std::vector<DirectoryEntry> entries(rng() % 8);
    for (auto& e : entries) {
      e.name.resize(rng() % 20);
      for (char& c : e.name) c = static_cast<char>(rng() % 256);
      e.size = rng();
    }
    REQUIRE(unpack_directory(pack_directory(entries)) == entries);
  }
}

TEST_CASE("malformed directories report the failing offset") {
  const std::vector<std::uint8_t> short_header = {0};
  CHECK_THROWS_AS(unpack_directory(short_header), ParseError);
  // Count says 1, name length 5, but only 2 name bytes follow.
  const std::vector<std::uint8_t> truncated = {0, 1, 0, 5, 'a', 'b'};
  try {
    (void)unpack_directory(truncated);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  auto bytes = pack_directory(std::vector<DirectoryEntry>{{"x", 1}});
  bytes.push_back(0);
  CHECK_THROWS_AS(unpack_directory(bytes), ParseError);
  std::size_t used = 0;
  CHECK(unpack_directory_prefix(bytes, &used).size() == 1);
  CHECK(used == bytes.size() - 1);
}
