#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnaskew/channel.hpp"
#include "dnaskew/pipeline.hpp"
#include "dnaskew/quality.hpp"

namespace dnaskew {

inline constexpr int kCsvSchemaVersion = 1;

/// A layout under test: a strategy plus, for DnaMapper, the bit ranking
/// ("dnamapper" is positional, "dnamapper_oracle" uses flip profiling).
struct LayoutChoice {
  Strategy strategy = Strategy::Baseline;
  bool oracle_ranking = false;

  std::string label() const;
  static LayoutChoice parse(const std::string& name);
};

struct ExperimentConfig {
  int m = 8;
  double redundancy = 0.184;
  int rows = 21;
  std::vector<int> reserved_rows;
  std::vector<std::string> layouts = {"baseline", "gini", "dnamapper"};
  std::vector<double> error_rates = {0.09};
  ErrorBreakdown breakdown;
  std::string coverage_model = "fixed";  // fixed | gamma
  double gamma_shape = 4.0;
  std::vector<int> coverages = {20};
  int min_coverage_start = 1;
  int max_coverage = 40;
  int trials = 50;
  std::uint64_t seed = 1;
  int drop_last_columns = 0;  // erase the last d columns of every trial
  double ref_db = kDefaultReferenceDb;
  std::size_t profile_stride = 64;
  bool timing = false;  // adds wall-time columns (not reproducible)
  int threads = 1;      // not part of the serialized config

  Geometry geometry(Strategy s) const;
  std::vector<LayoutChoice> layout_choices() const;
  CoverageModel coverage(double n) const;
  ChannelConfig channel(double p) const;
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// '#' comment lines: schema version, kind, config hash, seed and config.
void write_csv_header(std::ostream& os, const std::string& kind, const ExperimentConfig& c);

/// Received matrix for one simulated trial: the channel draws depend on
/// (seed, trial, column) only, so layouts, error rates and coverages share
/// outcomes and a larger fixed coverage extends the read set of a smaller.
EncodingMatrix simulate_trial(const EncodedUnit& unit, const std::vector<std::string>& strands,
                              const ChannelConfig& channel, const CoverageModel& coverage,
                              std::uint64_t trial, int drop_last_columns);

// --- per-codeword error distribution -------------------------------------

struct SkewResult {
  double p = 0;
  int coverage = 0;
  std::vector<std::uint64_t> baseline;  // symbol errors per codeword, summed over trials
  std::vector<std::uint64_t> gini;
  std::uint64_t total() const;
};

/// One simulated matrix per trial; every wrong or erased cell is charged to
/// its owning codeword under both Baseline and Gini ownership.
SkewResult run_skew(const ExperimentConfig& c);
void write_skew_csv(std::ostream& os, const ExperimentConfig& c, const SkewResult& r);

// --- minimum error-free coverage -------------------------------------------

struct MinCoverageRow {
  double p = 0;
  std::string layout;
  std::optional<int> min_coverage;  // empty: not found up to max_coverage
};

std::vector<MinCoverageRow> run_min_coverage(const ExperimentConfig& c);
void write_min_coverage_csv(std::ostream& os, const ExperimentConfig& c,
                            const std::vector<MinCoverageRow>& rows);

// --- quality sweep -----------------------------------------------------------

struct RunRecord {
  std::string layout;
  double p = 0;
  int coverage = 0;
  int trial = 0;
  bool decode_success = false;
  int failed_codewords = 0;
  std::vector<QualityResult> losses;  // per file
  double wall_ms = 0;

  int undecodable_files() const;
  /// Mean loss over decodable files; 0 when none decodes.
  double mean_loss() const;
};

struct SweepPoint {
  std::string layout;
  double p = 0;
  int coverage = 0;
  int trials = 0;
  double mean_loss_db = 0;  // over decodable (file, trial) pairs
  double undecodable_rate = 0;  // fraction of (file, trial) pairs
  double failure_rate = 0;      // fraction of trials with a failed codeword
};

struct SweepResult {
  std::vector<std::string> file_names;
  std::vector<RunRecord> records;  // canonical order: p, coverage, layout, trial
  std::vector<SweepPoint> summary() const;
};

/// Files must be JPEG when quality losses are wanted; non-JPEG files are
/// scored 0 when byte-exact and undecodable otherwise.
SweepResult run_quality_sweep(const ExperimentConfig& c, const std::vector<InputFile>& files);
void write_sweep_csv(std::ostream& os, const ExperimentConfig& c, const SweepResult& r);
void write_sweep_summary_csv(std::ostream& os, const ExperimentConfig& c, const SweepResult& r);

// --- single-bit flip profile --------------------------------------------------

struct BitProfileRow {
  std::size_t bit = 0;
  QualityResult result;
};

/// Flips every `stride`-th bit of `jpeg` (starting at bit 0) and scores it.
std::vector<BitProfileRow> run_bit_profile(const std::vector<std::uint8_t>& jpeg, std::size_t stride,
                                           double ref_db, int threads);
void write_bit_profile_csv(std::ostream& os, const ExperimentConfig& c,
                           const std::vector<BitProfileRow>& rows);

/// Oracle bit order of a JPEG (flip every bit, most damaging first).
std::vector<std::size_t> oracle_bit_order(const std::vector<std::uint8_t>& jpeg, double ref_db, int threads);

/// Random bytes that fill a unit of `geometry` next to its directory.
std::vector<InputFile> filler_files(const Geometry& geometry, std::uint64_t seed, std::uint64_t variant = 0);

}  // namespace dnaskew
