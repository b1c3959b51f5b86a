#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "dnaskew/channel.hpp"
#include "dnaskew/codec.hpp"

using namespace dnaskew;

namespace {

// |observed - expected| within `k` binomial standard deviations.
bool near_binomial(double count, double n, double prob, double k = 4.0) {
  return std::abs(count - n * prob) <= k * std::sqrt(n * prob * (1 - prob)) + 1e-9;
}

}  // namespace

TEST_CASE("p=0 reads are exact copies") {
  ChannelConfig ch;
  Rng rng = stream_rng(1, {});
  const std::string s = "ACGTTTGACCA";
  for (int i = 0; i < 100; ++i) CHECK(corrupt_read(s, ch, rng) == s);
}

TEST_CASE("substitution-only p=1 changes every base and keeps the length") {
  ChannelConfig ch;
  ch.p = 1.0;
  ch.breakdown = ErrorBreakdown::substitutions_only();
  Rng rng = stream_rng(2, {});
  const std::string s(200, 'G');
  const std::string r = corrupt_read(s, ch, rng);
  REQUIRE(r.size() == s.size());
  for (char c : r) CHECK(c != 'G');
}

TEST_CASE("event frequencies match the configured rates") {
  // A one-base strand makes each outcome identifiable from the read alone.
  ChannelConfig ch;
  ch.p = 0.1;
  Rng rng = stream_rng(3, {});
  const double n = 300000;
  double del = 0, ins = 0, sub = 0;
  std::vector<double> inserted(4, 0);
  for (int i = 0; i < static_cast<int>(n); ++i) {
    const std::string r = corrupt_read("C", ch, rng);
    if (r.empty()) {
      ++del;
    } else if (r.size() == 2) {
      ++ins;
      CHECK(r[1] == 'C');
      ++inserted[static_cast<std::size_t>(codec::base_value(r[0]))];
    } else if (r != "C") {
      ++sub;
    }
  }
  CHECK(near_binomial(del, n, 0.1 / 3));
  CHECK(near_binomial(ins, n, 0.1 / 3));
  CHECK(near_binomial(sub, n, 0.1 / 3));
  for (double c : inserted) CHECK(near_binomial(c, ins, 0.25));
}

TEST_CASE("mean read length on long strands") {
  ChannelConfig ch;
  ch.p = 0.1;
  ch.breakdown = {0.2, 0.5, 0.3};
  Rng rng = stream_rng(4, {});
  const std::string s(300, 'A');
  double total = 0;
  const int trials = 3000;
  for (int i = 0; i < trials; ++i) total += static_cast<double>(corrupt_read(s, ch, rng).size());
  // E[len] = L (1 - p del + p ins)
  CHECK(total / trials == doctest::Approx(300 * (1 - 0.05 + 0.03)).epsilon(0.002));
}

TEST_CASE("errors at a position are independent across reads") {
  ChannelConfig ch;
  ch.p = 0.2;
  ch.breakdown = ErrorBreakdown::substitutions_only();
  const std::vector<std::string> strands(4000, "AAAA");
  const auto clusters = make_clusters(strands, ch, CoverageModel::fixed(2), 0);
  double a = 0, b = 0, ab = 0;
  for (const auto& c : clusters) {
    const bool x = c.reads[0][0] != 'A';
    const bool y = c.reads[1][0] != 'A';
    a += x;
    b += y;
    ab += x && y;
  }
  const double n = static_cast<double>(clusters.size());
  CHECK(near_binomial(ab, n, 0.04));
  CHECK(near_binomial(a, n, 0.2));
  CHECK(near_binomial(b, n, 0.2));
}

TEST_CASE("config validation") {
  ChannelConfig ch;
  ch.p = 1.5;
  CHECK_THROWS(ch.validate());
  ch.p = 0.1;
  ch.breakdown = {0.5, 0.5, 0.5};
  CHECK_THROWS(ch.validate());
  CHECK_THROWS(CoverageModel::fixed(-1).validate());
  CHECK_THROWS(CoverageModel::gamma(0).validate());
}

TEST_CASE("gamma coverage has the requested mean") {
  Rng rng = stream_rng(5, {});
  const auto v = sample_coverage(CoverageModel::gamma(12.0, 4.0), 50000, rng);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  CHECK(mean == doctest::Approx(12.0).epsilon(0.02));
  const auto f = sample_coverage(CoverageModel::fixed(7), 10, rng);
  for (int x : f) CHECK(x == 7);
}

TEST_CASE("clusters are reproducible and nested in coverage") {
  ChannelConfig ch;
  ch.p = 0.1;
  ch.seed = 9;
  const std::vector<std::string> strands = {"ACGTACGTAC", "TTTTGGGGCC", "GATTACA"};
  const auto a = make_clusters(strands, ch, CoverageModel::fixed(5), 3);
  const auto b = make_clusters(strands, ch, CoverageModel::fixed(5), 3, 4);
  const auto c = make_clusters(strands, ch, CoverageModel::fixed(8), 3);
  const auto d = make_clusters(strands, ch, CoverageModel::fixed(5), 4);
  bool any_diff = false;
  for (std::size_t k = 0; k < strands.size(); ++k) {
    CHECK(a[k].column == static_cast<int>(k));
    CHECK(a[k].reads == b[k].reads);
    CHECK(std::equal(a[k].reads.begin(), a[k].reads.end(), c[k].reads.begin()));
    any_diff = any_diff || a[k].reads != d[k].reads;
  }
  CHECK(any_diff);
}

TEST_CASE("reads file round trip") {
  ChannelConfig ch;
  ch.p = 0.2;
  const std::vector<std::string> strands = {"ACGT", "GGCC", "AATT"};
  auto clusters = make_clusters(strands, ch, CoverageModel::fixed(3), 0);
  clusters[1].reads.clear();
  std::stringstream ss;
  write_reads(ss, clusters);
  const auto back = read_reads(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].reads == clusters[0].reads);
  CHECK(back[1].column == 2);
  CHECK(back[1].reads == clusters[2].reads);

  std::stringstream bad("0\tACGT\nnot-a-line\n");
  try {
    (void)read_reads(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
  }
}
