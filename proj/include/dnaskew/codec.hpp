#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dnaskew/gf.hpp"

namespace dnaskew {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace codec {

/// 00=A 01=C 10=G 11=T.
inline constexpr char kBases[4] = {'A', 'C', 'G', 'T'};

/// -1 for anything that is not an uppercase A/C/G/T.
inline int base_value(char b) {
  switch (b) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
  }
}

/// `bits` is a string of '0'/'1' of even length.
std::string bits_to_bases(std::string_view bits);
std::string bases_to_bits(std::string_view bases);

/// Appends the m/2 bases of an m-bit symbol, most significant pair first.
void append_symbol(std::string& out, Symbol value, int bits);
/// Reads m/2 bases starting at `offset`. Throws ParseError on a non-ACGT base.
Symbol read_symbol(std::string_view bases, std::size_t offset, int bits);

// Bit access on MSB-first byte buffers.
inline bool get_bit(std::span<const std::uint8_t> bytes, std::size_t i) {
  return (bytes[i >> 3] >> (7 - (i & 7))) & 1u;
}
inline void set_bit(std::span<std::uint8_t> bytes, std::size_t i, bool v) {
  const std::uint8_t mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
  if (v) {
    bytes[i >> 3] |= mask;
  } else {
    bytes[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }
}

}  // namespace codec

/// Default access primers (20 bases each).
inline constexpr std::string_view kDefaultPrimer5 = "CTACACGACGCTCTTCCGAT";
inline constexpr std::string_view kDefaultPrimer3 = "AGATCGGAAGAGCACACGTC";

/// primer5 | index (m bits) | R payload symbols (m bits each) | primer3
struct StrandLayout {
  std::string primer5;
  std::string primer3;
  int symbol_bits = 8;  // m; the index uses the same width
  int rows = 0;         // R

  static StrandLayout make(int symbol_bits, int rows, bool with_primers = true);

  int index_bases() const { return symbol_bits / 2; }
  /// Index + payload, the region exposed to the sequencing channel.
  int inner_length() const { return index_bases() + rows * symbol_bits / 2; }
  int length() const {
    return static_cast<int>(primer5.size() + primer3.size()) + inner_length();
  }
  /// Largest usable column index + 1 (= K).
  int column_limit() const { return (1 << symbol_bits) - 1; }
  StrandLayout without_primers() const;
  void validate() const;
};

struct Strand {
  int column = 0;
  std::string bases;
};

enum class StrandStatus { Ok, LengthMismatch, InvalidIndex, InvalidBase };

struct ParsedStrand {
  StrandStatus status = StrandStatus::Ok;
  int column = -1;
  std::vector<Symbol> payload;

  bool ok() const { return status == StrandStatus::Ok; }
};

Strand assemble_strand(const StrandLayout& layout, int column, std::span<const Symbol> payload);
/// No validation beyond length, alphabet and index range: a corrupted but
/// well-formed index simply yields a different column.
ParsedStrand parse_strand(const StrandLayout& layout, std::string_view bases);

}  // namespace dnaskew
