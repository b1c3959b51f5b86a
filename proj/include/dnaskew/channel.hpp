#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnaskew {

using Rng = std::mt19937_64;

/// Engine for an independent stream keyed by (seed, keys...). Keys are mixed
/// with splitmix64 so nearby keys give unrelated streams, and the stream for
/// a given key never depends on how other streams were scheduled.
Rng stream_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);
/// Uniform integer in [0, n).
std::uint32_t uniform_below(Rng& rng, std::uint32_t n);

struct ErrorBreakdown {
  double substitution = 1.0 / 3.0;
  double deletion = 1.0 / 3.0;
  double insertion = 1.0 / 3.0;

  static ErrorBreakdown equal() { return {}; }
  static ErrorBreakdown substitutions_only() { return {1.0, 0.0, 0.0}; }
};

struct ChannelConfig {
  double p = 0.0;
  ErrorBreakdown breakdown;
  std::uint64_t seed = 1;
  std::string alphabet = "ACGT";

  void validate() const;
};

struct CoverageModel {
  enum class Kind { Fixed, Gamma };
  Kind kind = Kind::Fixed;
  double mean = 0.0;  // Fixed: the count itself
  double shape = 4.0;

  static CoverageModel fixed(int n) { return {Kind::Fixed, static_cast<double>(n), 0.0}; }
  static CoverageModel gamma(double mean, double shape = 4.0) { return {Kind::Gamma, mean, shape}; }
  void validate() const;
  int draw(Rng& rng) const;
};

/// One left-to-right pass over the strand; at each position at most one of
/// deletion (p*del), insertion of a uniform symbol before it (p*ins), or
/// substitution by a uniform different symbol (p*sub) happens.
std::string corrupt_read(std::string_view strand, const ChannelConfig& cfg, Rng& rng);

std::vector<int> sample_coverage(const CoverageModel& model, int count, Rng& rng);

struct Cluster {
  int column = 0;
  std::vector<std::string> reads;
};

/// Cluster k holds count_k independent corruptions of strands[k]. Reads of
/// cluster k come from stream (seed, trial, k) in order, so the first n
/// reads are the same for any coverage >= n.
std::vector<Cluster> make_clusters(std::span<const std::string> strands, const ChannelConfig& cfg,
                                   const CoverageModel& model, std::uint64_t trial = 0,
                                   int threads = 1);

/// "cluster_id<TAB>sequence" per read.
void write_reads(std::ostream& os, std::span<const Cluster> clusters);
std::vector<Cluster> read_reads(std::istream& is);

}  // namespace dnaskew
