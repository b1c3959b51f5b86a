#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnaskew {

class CapacityError : public std::runtime_error {
 public:
  CapacityError(std::size_t requested_bits, std::size_t capacity_bits);
  std::size_t requested_bits() const { return requested_; }
  std::size_t capacity_bits() const { return capacity_; }

 private:
  std::size_t requested_;
  std::size_t capacity_;
};

/// Where one payload bit lives: its reliability class (0 = most reliable)
/// and its slot inside that class.
struct ClassSlot {
  int class_rank = 0;
  std::size_t position = 0;
};

/// A contiguous run of payload bits that lands on a contiguous run of slots
/// in one class.
struct RankSegment {
  std::size_t payload_offset = 0;
  std::size_t count = 0;
  int class_rank = 0;
  std::size_t class_offset = 0;
};

/// Priority-ordered assignment of payload bits to reliability classes.
///
/// The payload is the concatenation of the ranked files in order, followed
/// by zero padding up to the total class capacity. The assignment is a
/// bijection between payload bits and class slots.
class BitRanking {
 public:
  BitRanking() = default;
  BitRanking(std::vector<std::size_t> class_capacities, std::vector<std::size_t> file_bits,
             std::vector<RankSegment> segments);

  int class_count() const { return static_cast<int>(capacities_.size()); }
  const std::vector<std::size_t>& class_capacities() const { return capacities_; }
  /// Bit length of each ranked file (padding excluded).
  const std::vector<std::size_t>& file_bits() const { return file_bits_; }
  const std::vector<RankSegment>& segments() const { return segments_; }
  std::size_t total_bits() const { return total_; }

  ClassSlot assignment(std::size_t payload_bit) const;
  /// Bits of file `f` placed in class `c`.
  std::size_t share(std::size_t file, int class_rank) const;

 private:
  std::vector<std::size_t> capacities_;
  std::vector<std::size_t> file_bits_;
  std::vector<RankSegment> segments_;
  std::size_t total_ = 0;
};

/// Position-based ranking: within each file earlier bits get more reliable
/// classes, and every class is shared among files in proportion to file
/// size (per-class shares are floor or ceil of the exact proportion; the
/// rounding keeps both class and file totals exact). When
/// `first_is_directory` is set, file 0 is placed entirely in the top
/// classes before the proportional split.
BitRanking rank_bits_positional(std::span<const std::size_t> file_bits,
                                std::span<const std::size_t> class_capacities,
                                bool first_is_directory = false);

/// Loss reported for one corrupted file; `undecodable` sorts above any loss.
struct FlipLoss {
  bool undecodable = false;
  double loss_db = 0.0;
};

/// Flip-profiling ranking: flips each bit in turn and orders bit indices by
/// descending loss (ties by ascending index). `quality_fn` must be
/// re-entrant when `threads` > 1.
std::vector<std::size_t> rank_bits_oracle(std::span<const std::uint8_t> file,
                                          const std::function<FlipLoss(std::span<const std::uint8_t>)>& quality_fn,
                                          int threads = 1);

struct DirectoryEntry {
  std::string name;
  std::uint64_t size = 0;

  bool operator==(const DirectoryEntry&) const = default;
};

/// u16 count, then per entry u16 name length, name bytes, u64 size; big-endian.
std::vector<std::uint8_t> pack_directory(std::span<const DirectoryEntry> entries);
/// Throws ParseError with the byte offset of the first malformed field.
std::vector<DirectoryEntry> unpack_directory(std::span<const std::uint8_t> bytes);
/// Like unpack_directory, but tolerates trailing bytes; returns the number
/// of bytes consumed through `consumed`.
std::vector<DirectoryEntry> unpack_directory_prefix(std::span<const std::uint8_t> bytes,
                                                    std::size_t* consumed);

}  // namespace dnaskew
