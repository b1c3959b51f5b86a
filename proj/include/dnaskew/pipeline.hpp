#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dnaskew/channel.hpp"
#include "dnaskew/codec.hpp"
#include "dnaskew/layout.hpp"
#include "dnaskew/priority.hpp"

namespace dnaskew {

/// Matrix geometry and placement strategy of one encoding unit.
struct Geometry {
  int m = 8;
  double redundancy = 0.184;  // E / K
  int rows = 21;              // R
  Strategy strategy = Strategy::Baseline;
  std::vector<int> reserved_rows;  // Gini only
  /// XOR the padded payload with a fixed keystream before placement, so
  /// padding and repetitive file content do not become homopolymer runs.
  bool scramble = true;

  CodeSpec code_spec() const { return CodeSpec::with_redundancy(m, redundancy); }
  StrandLayout strand_layout(bool with_primers = true) const {
    return StrandLayout::make(m, rows, with_primers);
  }
  std::size_t capacity_bytes() const;
  void validate() const;
};

struct InputFile {
  std::string name;
  std::vector<std::uint8_t> bytes;
  /// Optional bit priority order (most important first, a permutation of
  /// 0..8*size-1). Empty means file order. Used for oracle rankings.
  std::vector<std::size_t> bit_order;
};

/// Files of a unit in payload order; entry 0 is the directory.
struct FileTable {
  std::vector<DirectoryEntry> entries;

  std::vector<std::size_t> bit_sizes() const;
  std::size_t total_bytes() const;
};

/// XORs `bytes` with the fixed payload keystream (an involution).
void apply_scrambler(std::span<std::uint8_t> bytes);

/// Layout for `geometry`; `table` is needed for DnaMapper rankings.
MatrixLayout make_layout(const Geometry& geometry, const FileTable& table);

struct EncodedUnit {
  Geometry geometry;
  FileTable table;
  MatrixLayout layout;
  EncodingMatrix matrix;
  std::vector<std::uint8_t> payload;  // directory + files, unpadded, unscrambled
};

/// Packs the directory and files into one payload and encodes it. Throws
/// CapacityError when the payload does not fit and std::invalid_argument
/// for an empty file list.
EncodedUnit encode_files(std::span<const InputFile> files, const Geometry& geometry);

/// Full synthesized strands (with primers), one per column.
std::vector<Strand> unit_strands(const EncodedUnit& unit, bool with_primers = true);
/// Index + payload region of every strand, the input to the channel.
std::vector<std::string> channel_strands(const EncodedUnit& unit);

/// Reconstructs each non-empty cluster with two-way consensus over the
/// index + payload region, parses it and assembles the received matrix.
EncodingMatrix reconstruct_matrix(std::span<const Cluster> clusters, const MatrixLayout& layout,
                                  const StrandLayout& inner, int threads = 1);

struct DecodedUnit {
  RecoveredPayload recovered;
  std::vector<InputFile> files;  // directory excluded
  bool directory_matches = false;
};

/// Decodes every codeword and undoes the scrambler; bytes cover the full
/// capacity.
RecoveredPayload recover_unit(const EncodingMatrix& received, const Geometry& geometry,
                              const MatrixLayout& layout, int threads = 1);

/// Decodes the received matrix and splits the payload by `table`.
/// `bit_orders` (per data file, may be empty) undoes oracle permutations.
DecodedUnit decode_unit(const EncodingMatrix& received, const Geometry& geometry,
                        const MatrixLayout& layout, const FileTable& table,
                        std::span<const std::vector<std::size_t>> bit_orders = {}, int threads = 1);

/// Bits of `bytes` rearranged so that output bit k is input bit order[k].
std::vector<std::uint8_t> permute_bits(std::span<const std::uint8_t> bytes,
                                       std::span<const std::size_t> order);
std::vector<std::uint8_t> unpermute_bits(std::span<const std::uint8_t> bytes,
                                         std::span<const std::size_t> order);

}  // namespace dnaskew
