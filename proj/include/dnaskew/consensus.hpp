#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnaskew/channel.hpp"

namespace dnaskew {

struct ReconstructionParams {
  int length = 0;   // L, output length in symbols
  int window = 2;   // W, lookahead used to classify a disagreeing read
  std::string alphabet = "ACGT";  // also the vote tie-break order
};

/// Levenshtein distance.
int edit_distance(std::string_view a, std::string_view b);

/// Left-to-right majority alignment with one pointer per read.
///
/// At each output position the in-bounds pointer characters vote. Reads that
/// agree advance by one. A disagreeing read compares its lookahead with the
/// majority window of the agreeing reads under three hypotheses and takes
/// the best one (ties: substitution, deletion, insertion):
///   substitution  read[p+1..p+W]  vs window        -> advance 1
///   deletion      read[p..p+W-1]  vs window        -> advance 0
///   insertion     read[p+1..p+W]  vs vote + window -> advance 2
/// Reads with fewer than W characters after the pointer skip the
/// classification and advance by one. Output is always exactly L long.
std::string one_way(std::span<const std::string> reads, const ReconstructionParams& params);

/// First ceil(L/2) symbols from the forward pass, last floor(L/2) from the
/// pass over reversed reads.
std::string two_way(std::span<const std::string> reads, const ReconstructionParams& params);

/// Exhaustive constrained edit-distance median.
///
/// Among all length-L strings over `alphabet` minimizing the summed edit
/// distance to the reads, returns the one that agrees with `original` on the
/// highest total weight w_i = min(i, L-1-i), i.e. the candidate that is most
/// accurate in the middle; remaining ties go to the lexicographically first.
/// L is capped at 16 for binary and 10 for quaternary alphabets unless
/// `allow_large` is set.
std::string constrained_median_bruteforce(std::span<const std::string> reads, int length,
                                          std::string_view original, std::string_view alphabet,
                                          bool allow_large = false);

/// Summed edit distance from `candidate` to every read.
int total_edit_distance(std::string_view candidate, std::span<const std::string> reads);

enum class Reconstructor { OneWay, TwoWay, Oracle };
std::string to_string(Reconstructor r);
Reconstructor parse_reconstructor(const std::string& name);

struct SkewConfig {
  double p = 0.1;
  ErrorBreakdown breakdown;
  int coverage = 5;  // N
  int length = 110;  // L
  Reconstructor algorithm = Reconstructor::TwoWay;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string alphabet = "ACGT";
  int window = 2;
  int threads = 1;
  bool keep_trials = false;
  bool allow_large = false;
};

struct SkewProfile {
  SkewConfig config;
  std::vector<double> error;            // per position
  std::vector<std::uint32_t> mismatches;  // per position, summed over trials
  /// trials x L error indicators, filled when config.keep_trials is set.
  std::vector<std::uint8_t> per_trial;
};

/// Per trial: random strand, N reads through the channel, reconstruction,
/// position-wise comparison without re-alignment.
SkewProfile skew_profile(const SkewConfig& config);

/// CSV with columns position,error_probability,trials,p,N,L,algorithm.
void write_skew_profile_csv(std::ostream& os, const SkewProfile& profile);

}  // namespace dnaskew
