#include "dnaskew/codec.hpp"

namespace dnaskew {

namespace codec {

std::string bits_to_bases(std::string_view bits) {
  if (bits.size() % 2 != 0) {
    throw std::invalid_argument("bit string length " + std::to_string(bits.size()) + " is odd");
  }
  std::string out;
  out.reserve(bits.size() / 2);
  for (std::size_t i = 0; i < bits.size(); i += 2) {
    int v = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      const char c = bits[i + k];
      if (c != '0' && c != '1') throw ParseError("invalid bit character", i + k);
      v = (v << 1) | (c - '0');
    }
    out.push_back(kBases[v]);
  }
  return out;
}

std::string bases_to_bits(std::string_view bases) {
  std::string out;
  out.reserve(bases.size() * 2);
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const int v = base_value(bases[i]);
    if (v < 0) throw ParseError(std::string("invalid base '") + bases[i] + "'", i);
    out.push_back(static_cast<char>('0' + (v >> 1)));
    out.push_back(static_cast<char>('0' + (v & 1)));
  }
  return out;
}

void append_symbol(std::string& out, Symbol value, int bits) {
  for (int shift = bits - 2; shift >= 0; shift -= 2) out.push_back(kBases[(value >> shift) & 3]);
}

Symbol read_symbol(std::string_view bases, std::size_t offset, int bits) {
  unsigned v = 0;
  for (int k = 0; k < bits / 2; ++k) {
    const int b = base_value(bases[offset + static_cast<std::size_t>(k)]);
    if (b < 0) throw ParseError("invalid base", offset + static_cast<std::size_t>(k));
    v = (v << 2) | static_cast<unsigned>(b);
  }
  return static_cast<Symbol>(v);
}

}  // namespace codec

StrandLayout StrandLayout::make(int symbol_bits, int rows, bool with_primers) {
  StrandLayout l;
  l.symbol_bits = symbol_bits;
  l.rows = rows;
  if (with_primers) {
    l.primer5 = std::string(kDefaultPrimer5);
    l.primer3 = std::string(kDefaultPrimer3);
  }
  l.validate();
  return l;
}

StrandLayout StrandLayout::without_primers() const {
  StrandLayout l = *this;
  l.primer5.clear();
  l.primer3.clear();
  return l;
}

void StrandLayout::validate() const {
  if (symbol_bits < 2 || symbol_bits > 16 || symbol_bits % 2 != 0) {
    throw std::invalid_argument("strand symbols must be an even width in 2..16 bits, got " +
                                std::to_string(symbol_bits));
  }
  if (rows < 1) throw std::invalid_argument("strand layout needs at least one row");
  for (const std::string* p : {&primer5, &primer3}) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      if (codec::base_value((*p)[i]) < 0) throw ParseError("invalid primer base", i);
    }
  }
}

Strand assemble_strand(const StrandLayout& layout, int column, std::span<const Symbol> payload) {
  if (column < 0 || column >= (1 << layout.symbol_bits)) {
    throw std::invalid_argument("column index " + std::to_string(column) + " does not fit in " +
                                std::to_string(layout.symbol_bits) + " bits");
  }
  if (static_cast<int>(payload.size()) != layout.rows) {
    throw std::invalid_argument("strand payload must have " + std::to_string(layout.rows) +
                                " symbols, got " + std::to_string(payload.size()));
  }
  Strand s;
  s.column = column;
  s.bases.reserve(static_cast<std::size_t>(layout.length()));
  s.bases += layout.primer5;
  codec::append_symbol(s.bases, static_cast<Symbol>(column), layout.symbol_bits);
  const Symbol limit = static_cast<Symbol>((1u << layout.symbol_bits) - 1u);
  for (Symbol v : payload) {
    if (v > limit) throw std::invalid_argument("payload symbol exceeds symbol width");
    codec::append_symbol(s.bases, v, layout.symbol_bits);
  }
  s.bases += layout.primer3;
  return s;
}

ParsedStrand parse_strand(const StrandLayout& layout, std::string_view bases) {
  ParsedStrand out;
  if (static_cast<int>(bases.size()) != layout.length()) {
    out.status = StrandStatus::LengthMismatch;
    return out;
  }
  const std::size_t step = static_cast<std::size_t>(layout.symbol_bits / 2);
  std::size_t pos = layout.primer5.size();
  try {
    out.column = codec::read_symbol(bases, pos, layout.symbol_bits);
    pos += step;
    if (out.column >= layout.column_limit()) {
      out.status = StrandStatus::InvalidIndex;
      return out;
    }
    out.payload.reserve(static_cast<std::size_t>(layout.rows));
    for (int r = 0; r < layout.rows; ++r, pos += step) {
      out.payload.push_back(codec::read_symbol(bases, pos, layout.symbol_bits));
    }
  } catch (const ParseError&) {
    out.status = StrandStatus::InvalidBase;
    out.payload.clear();
  }
  return out;
}

}  // namespace dnaskew
