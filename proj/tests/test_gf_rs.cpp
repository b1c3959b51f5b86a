#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "dnaskew/gf.hpp"
#include "dnaskew/rs.hpp"

using namespace dnaskew;

namespace {

// Carry-less multiply then reduce, bit by bit.
std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, int m, std::uint32_t poly) {
  std::uint32_t r = 0;
  for (int i = 0; i < m; ++i) {
    if (b & (1u << i)) r ^= a << i;
  }
  for (int i = 2 * m - 2; i >= m; --i) {
    if (r & (1u << i)) r ^= poly << (i - m);
  }
  return r;
}

std::uint32_t slow_pow(std::uint32_t a, std::uint64_t e, int m, std::uint32_t poly) {
  std::uint32_t r = 1;
  while (e--) r = slow_mul(r, a, m, poly);
  return r;
}

// c(x) evaluated at alpha^k with position j holding the coefficient of x^(K-1-j).
std::uint32_t slow_eval(const std::vector<Symbol>& c, std::uint32_t x, int m, std::uint32_t poly) {
  std::uint32_t acc = 0;
  for (Symbol s : c) acc = slow_mul(acc, x, m, poly) ^ s;
  return acc;
}

std::vector<Symbol> make_data(const CodeSpec& spec, std::mt19937_64& rng) {
  std::vector<Symbol> d(static_cast<std::size_t>(spec.data_symbols()));
  for (auto& s : d) s = static_cast<Symbol>(rng() % spec.field().order());
  return d;
}

// Corrupts `e` random positions with nonzero error values and erases `f` others.
std::vector<int> corrupt(std::vector<Symbol>& word, int e, int f, std::uint32_t q, std::mt19937_64& rng) {
  std::vector<int> pos(word.size());
  std::iota(pos.begin(), pos.end(), 0);
  std::shuffle(pos.begin(), pos.end(), rng);
  for (int i = 0; i < e; ++i) word[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])] ^= static_cast<Symbol>(1 + rng() % (q - 1));
  std::vector<int> erasures(pos.begin() + e, pos.begin() + e + f);
  for (int p : erasures) word[static_cast<std::size_t>(p)] = static_cast<Symbol>(rng() % q);
  return erasures;
}

}  // namespace

TEST_CASE("field tables agree with bitwise multiplication") {
  for (int m : {2, 3, 4, 5, 6, 7, 8}) {
    const GaloisField f(m, GaloisField::default_poly(m));
    const std::uint32_t q = f.order();
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        REQUIRE(f.mul(static_cast<Symbol>(a), static_cast<Symbol>(b)) == slow_mul(a, b, m, f.poly()));
      }
    }
  }
  std::mt19937_64 rng(5);
  for (int m : {10, 12, 16}) {
    const GaloisField f(m, GaloisField::default_poly(m));
    for (int i = 0; i < 20000; ++i) {
      const auto a = static_cast<Symbol>(rng() % f.order());
      const auto b = static_cast<Symbol>(rng() % f.order());
      REQUIRE(f.mul(a, b) == slow_mul(a, b, m, f.poly()));
    }
  }
}

TEST_CASE("m=8 poly 0x11D: alpha=2 cycles through all 255 nonzero elements") {
  const GaloisField f(8, 0x11D);
  CHECK(f.exp(0) == 1);
  std::set<std::uint32_t> seen;
  std::uint32_t x = 1;
  for (int i = 0; i < 255; ++i) {
    seen.insert(x);
    x = slow_mul(x, 2, 8, 0x11D);
  }
  CHECK(x == 1);
  CHECK(seen.size() == 255);
  CHECK(f.alpha_pow(1) == 2);
}

TEST_CASE("m=16 has 65535 nonzero elements") {
  const auto f = GaloisField::make(16);
  CHECK(f->group_order() == 65535);
  CHECK(f->alpha_pow(65535) == 1);
  CHECK(f->alpha_pow(-1) == f->inv(2));
}

TEST_CASE("identity, inverse and division") {
  std::mt19937_64 rng(1);
  for (int m = 2; m <= 16; ++m) {
    const auto f = GaloisField::make(m);
    for (int i = 0; i < 100; ++i) {
      const auto a = static_cast<Symbol>(1 + rng() % f->group_order());
      const auto b = static_cast<Symbol>(1 + rng() % f->group_order());
      CHECK(f->mul(a, 1) == a);
      CHECK(f->mul(a, f->inv(a)) == 1);
      CHECK(f->mul(f->div(a, b), b) == a);
      CHECK(f->exp(f->log(a)) == a);
    }
  }
}

TEST_CASE("non-primitive or reducible polynomials are rejected by name") {
  // 0x11B is irreducible but x has order 51.
  CHECK_THROWS_WITH_AS(GaloisField(8, 0x11B), doctest::Contains("0x11B"), FieldError);
  CHECK_THROWS_AS(GaloisField(4, 0x15), FieldError);  // x^4+x^2+1 = (x^2+x+1)^2
  CHECK_THROWS_AS(GaloisField(4, 0x7), FieldError);   // wrong degree
  CHECK_THROWS_AS(GaloisField(1, 0x3), FieldError);
  CHECK_THROWS_AS(GaloisField(17, 0x3), FieldError);
}

TEST_CASE("code geometry") {
  const CodeSpec s = CodeSpec::make(8, 32);
  CHECK(s.length() == 255);
  CHECK(s.data_symbols() == 223);
  CHECK(s.parity_symbols() == 32);
  const CodeSpec r = CodeSpec::with_redundancy(8, 0.184);
  CHECK(r.parity_symbols() == 47);
  CHECK(r.data_symbols() + r.parity_symbols() == 255);
  const CodeSpec big = CodeSpec::with_redundancy(16, 0.184);
  CHECK(big.length() == 65535);
  CHECK(big.parity_symbols() == 12058);
  CHECK_THROWS(CodeSpec::make(8, 255));
  CHECK_THROWS(CodeSpec::make(8, -1));
}

TEST_CASE("encode is systematic and every codeword vanishes at the generator roots") {
  std::mt19937_64 rng(2);
  for (auto [m, e] : {std::pair{4, 4}, {8, 32}, {8, 47}, {6, 10}}) {
    const CodeSpec spec = CodeSpec::make(m, e);
    const ReedSolomon rs(spec);
    for (int t = 0; t < 20; ++t) {
      const auto data = make_data(spec, rng);
      const auto cw = rs.encode(data);
      REQUIRE(cw.size() == static_cast<std::size_t>(spec.length()));
      CHECK(std::equal(data.begin(), data.end(), cw.begin()));
      for (int k = 0; k < e; ++k) {
        const std::uint32_t root = slow_pow(2, static_cast<std::uint64_t>(k), m, spec.field().poly());
        REQUIRE(slow_eval(cw, root, m, spec.field().poly()) == 0);
      }
    }
  }
}

TEST_CASE("E=0 code is the identity") {
  const ReedSolomon rs(CodeSpec::make(4, 0));
  std::vector<Symbol> d(15);
  std::iota(d.begin(), d.end(), Symbol{0});
  CHECK(rs.encode(d) == d);
  const auto res = rs.decode(d, {});
  CHECK(res.ok());
}

TEST_CASE("round trip, full erasures and the capability bound at m=8") {
  const CodeSpec spec = CodeSpec::make(8, 32);
  const ReedSolomon rs(spec);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const auto cw = rs.encode(make_data(spec, rng));
    auto rx = cw;
    const int f = static_cast<int>(rng() % 33);
    const int e = static_cast<int>(rng() % ((32 - f) / 2 + 1));
    const auto erasures = corrupt(rx, e, f, 256, rng);
    const auto res = rs.decode(rx, erasures);
    REQUIRE(res.ok());
    REQUIRE(res.codeword == cw);
  }
  // Exactly E erasures and nothing else.
  auto cw = rs.encode(make_data(spec, rng));
  auto rx = cw;
  const auto erasures = corrupt(rx, 0, 32, 256, rng);
  const auto res = rs.decode(rx, erasures);
  CHECK(res.ok());
  CHECK(res.codeword == cw);
}

TEST_CASE("exhaustive error and erasure positions at m=4, E=4") {
  const CodeSpec spec = CodeSpec::make(4, 4);
  const ReedSolomon rs(spec);
  std::mt19937_64 rng(4);
  const int k = spec.length();
  long checked = 0;
  // Every (error set, erasure set) with 2e + f <= 4, one random value draw each.
  for (int e = 0; e <= 2; ++e) {
    const int fmax = 4 - 2 * e;
    for (std::uint32_t emask = 0; emask < (1u << k); ++emask) {
      if (__builtin_popcount(emask) != e) continue;
      for (std::uint32_t fmask = 0; fmask < (1u << k); ++fmask) {
        if ((fmask & emask) || __builtin_popcount(fmask) > fmax) continue;
        const auto cw = rs.encode(make_data(spec, rng));
        auto rx = cw;
        std::vector<int> erasures;
        for (int j = 0; j < k; ++j) {
          if (emask & (1u << j)) rx[static_cast<std::size_t>(j)] ^= static_cast<Symbol>(1 + rng() % 15);
          if (fmask & (1u << j)) {
            erasures.push_back(j);
            rx[static_cast<std::size_t>(j)] = static_cast<Symbol>(rng() % 16);
          }
        }
        const auto res = rs.decode(rx, erasures);
        REQUIRE(res.ok());
        REQUIRE(res.codeword == cw);
        ++checked;
      }
    }
  }
  // sum over e of C(15,e) * sum over f <= 4-2e of C(15-e,f)
  CHECK(checked == 1941 + 1590 + 105);
}

TEST_CASE("one symbol past the bound is always detected at distance E+1") {
  // Off the erasures the code has distance E+1-f = 2e, so no codeword is
  // within the e-1 errors the decoder could still accept.
  const CodeSpec spec = CodeSpec::make(4, 4);
  const ReedSolomon rs(spec);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 2000; ++t) {
    const auto cw = rs.encode(make_data(spec, rng));
    auto rx = cw;
    const auto erasures = corrupt(rx, 2, 1, 16, rng);
    const auto res = rs.decode(rx, erasures);
    REQUIRE_FALSE(res.ok());
    CHECK(res.corrected == 0);
  }
}

TEST_CASE("well past the bound the decoder fails or lands on another codeword") {
  const CodeSpec spec = CodeSpec::make(4, 4);
  const ReedSolomon rs(spec);
  std::mt19937_64 rng(7);
  int failures = 0, miscorrections = 0;
  const int trials = 5000;
  for (int t = 0; t < trials; ++t) {
    const auto cw = rs.encode(make_data(spec, rng));
    auto rx = cw;
    corrupt(rx, 3, 0, 16, rng);
    const auto res = rs.decode(rx, {});
    REQUIRE(res.codeword != cw);
    if (!res.ok()) {
      ++failures;
    } else {
      ++miscorrections;
      for (Symbol s : rs.syndromes(res.codeword)) REQUIRE(s == 0);
      int dist = 0;
      for (std::size_t j = 0; j < rx.size(); ++j) dist += rx[j] != res.codeword[j];
      REQUIRE(dist <= 2);
    }
  }
  MESSAGE("3 errors at E=4: failures=" << failures << " miscorrections=" << miscorrections);
  CHECK(failures > 0);
  CHECK(miscorrections > 0);
}

TEST_CASE("failed decode returns the received word with erasures zeroed") {
  const CodeSpec spec = CodeSpec::make(8, 8);
  const ReedSolomon rs(spec);
  std::mt19937_64 rng(7);
  const auto cw = rs.encode(make_data(spec, rng));
  auto rx = cw;
  for (int j = 0; j < 40; ++j) rx[static_cast<std::size_t>(j * 5)] ^= 0x5A;
  const std::vector<int> erasures = {1, 2};
  const auto res = rs.decode(rx, erasures);
  REQUIRE_FALSE(res.ok());
  auto expect = rx;
  expect[1] = 0;
  expect[2] = 0;
  CHECK(res.codeword == expect);
}

TEST_CASE("decoder rejects bad input") {
  const ReedSolomon rs(CodeSpec::make(4, 4));
  std::vector<Symbol> short_word(10, 0);
  CHECK_THROWS_AS(rs.decode(short_word, {}), std::invalid_argument);
  std::vector<Symbol> word(15, 0);
  const std::vector<int> bad = {15};
  CHECK_THROWS_AS(rs.decode(word, bad), std::invalid_argument);
  std::vector<Symbol> data(11, 0);
  data[0] = 16;
  CHECK_THROWS_AS(rs.encode(data), std::invalid_argument);
  // More erasures than parity symbols cannot be decoded.
  const std::vector<int> five = {0, 1, 2, 3, 4};
  CHECK_FALSE(rs.decode(word, five).ok());
}

TEST_CASE("m=16 code corrects errors and erasures") {
  const CodeSpec spec = CodeSpec::make(16, 16);
  const ReedSolomon rs(spec);
  std::mt19937_64 rng(8);
  const auto cw = rs.encode(make_data(spec, rng));
  auto rx = cw;
  const auto erasures = corrupt(rx, 5, 6, 65536, rng);
  const auto res = rs.decode(rx, erasures);
  REQUIRE(res.ok());
  CHECK(res.codeword == cw);
  CHECK(res.corrected == 11);
}
