#include "dnaskew/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "dnaskew/channel.hpp"
#include "dnaskew/consensus.hpp"
#include "dnaskew/parallel.hpp"

namespace dnaskew {

std::size_t Geometry::capacity_bytes() const {
  const CodeSpec spec = code_spec();
  return static_cast<std::size_t>(rows) * spec.data_symbols() * m / 8;
}

void Geometry::validate() const {
  if (m < 2 || m > 16 || m % 2 != 0) {
    throw std::invalid_argument("symbol width must be even and in 2..16, got " + std::to_string(m));
  }
  if (rows < 1) throw std::invalid_argument("need at least one row");
  if (redundancy < 0.0 || redundancy >= 1.0) {
    throw std::invalid_argument("redundancy fraction must be in [0, 1)");
  }
  if (!reserved_rows.empty() && strategy != Strategy::Gini) {
    throw std::invalid_argument("reserved rows only apply to the gini layout");
  }
}

std::vector<std::size_t> FileTable::bit_sizes() const {
  std::vector<std::size_t> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(static_cast<std::size_t>(e.size) * 8);
  return out;
}

std::size_t FileTable::total_bytes() const {
  std::size_t t = 0;
  for (const auto& e : entries) t += static_cast<std::size_t>(e.size);
  return t;
}

void apply_scrambler(std::span<std::uint8_t> bytes) {
  Rng rng = stream_rng(0x5C2A3B1E9D4F6071ull, {});
  std::size_t i = 0;
  while (i < bytes.size()) {
    std::uint64_t word = rng();
    for (int k = 0; k < 8 && i < bytes.size(); ++k, ++i) {
      bytes[i] ^= static_cast<std::uint8_t>(word);
      word >>= 8;
    }
  }
}

MatrixLayout make_layout(const Geometry& g, const FileTable& table) {
  g.validate();
  const CodeSpec spec = g.code_spec();
  switch (g.strategy) {
    case Strategy::Baseline: return MatrixLayout::baseline(spec, g.rows);
    case Strategy::Gini: return MatrixLayout::gini(spec, g.rows, g.reserved_rows);
    case Strategy::DnaMapper: {
      const std::size_t class_bits = static_cast<std::size_t>(spec.data_symbols()) * g.m;
      const std::vector<std::size_t> caps(static_cast<std::size_t>(g.rows), class_bits);
      const std::vector<std::size_t> sizes = table.bit_sizes();
      return MatrixLayout::dna_mapper(spec, g.rows, rank_bits_positional(sizes, caps, true));
    }
  }
  throw std::logic_error("unhandled strategy");
}

std::vector<std::uint8_t> permute_bits(std::span<const std::uint8_t> bytes,
                                       std::span<const std::size_t> order) {
  if (order.size() != bytes.size() * 8) throw std::invalid_argument("bit order does not match file size");
  std::vector<std::uint8_t> out(bytes.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (codec::get_bit(bytes, order[k])) codec::set_bit(out, k, true);
  }
  return out;
}

std::vector<std::uint8_t> unpermute_bits(std::span<const std::uint8_t> bytes,
                                         std::span<const std::size_t> order) {
  if (order.size() != bytes.size() * 8) throw std::invalid_argument("bit order does not match file size");
  std::vector<std::uint8_t> out(bytes.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (codec::get_bit(bytes, k)) codec::set_bit(out, order[k], true);
  }
  return out;
}

EncodedUnit encode_files(std::span<const InputFile> files, const Geometry& geometry) {
  if (files.empty()) throw std::invalid_argument("nothing to encode: no input files");
  geometry.validate();
  std::vector<DirectoryEntry> dir;
  dir.reserve(files.size());
  for (const InputFile& f : files) dir.push_back({f.name, f.bytes.size()});
  const std::vector<std::uint8_t> dir_bytes = pack_directory(dir);

  EncodedUnit unit{geometry, {}, MatrixLayout::baseline(geometry.code_spec(), geometry.rows), {}, {}};
  unit.table.entries.push_back({"", dir_bytes.size()});
  unit.table.entries.insert(unit.table.entries.end(), dir.begin(), dir.end());

  const std::size_t capacity = geometry.capacity_bytes();
  if (unit.table.total_bytes() > capacity) {
    throw CapacityError(unit.table.total_bytes() * 8, capacity * 8);
  }

  unit.payload = dir_bytes;
  for (const InputFile& f : files) {
    if (f.bit_order.empty()) {
      unit.payload.insert(unit.payload.end(), f.bytes.begin(), f.bytes.end());
    } else {
      const auto p = permute_bits(f.bytes, f.bit_order);
      unit.payload.insert(unit.payload.end(), p.begin(), p.end());
    }
  }
  unit.layout = make_layout(geometry, unit.table);
  if (geometry.scramble) {
    std::vector<std::uint8_t> stored(capacity, 0);
    std::copy(unit.payload.begin(), unit.payload.end(), stored.begin());
    apply_scrambler(stored);
    unit.matrix = unit.layout.build_matrix(stored);
  } else {
    unit.matrix = unit.layout.build_matrix(unit.payload);
  }
  return unit;
}

std::vector<Strand> unit_strands(const EncodedUnit& unit, bool with_primers) {
  return matrix_to_strands(unit.matrix, unit.geometry.strand_layout(with_primers));
}

std::vector<std::string> channel_strands(const EncodedUnit& unit) {
  std::vector<std::string> out;
  for (Strand& s : unit_strands(unit, false)) out.push_back(std::move(s.bases));
  return out;
}

EncodingMatrix reconstruct_matrix(std::span<const Cluster> clusters, const MatrixLayout& layout,
                                  const StrandLayout& inner, int threads) {
  ReconstructionParams params;
  params.length = inner.length();
  std::vector<ParsedStrand> parsed(clusters.size());
  parallel_for(clusters.size(), threads, [&](std::size_t i) {
    const Cluster& c = clusters[i];
    if (c.reads.empty()) {
      parsed[i].status = StrandStatus::LengthMismatch;
      return;
    }
    parsed[i] = parse_strand(inner, two_way(c.reads, params));
  });
  return strands_to_matrix(resolve_columns(parsed, inner.column_limit()), layout);
}

RecoveredPayload recover_unit(const EncodingMatrix& received, const Geometry& geometry,
                              const MatrixLayout& layout, int threads) {
  RecoveredPayload out = layout.recover_payload(received, threads);
  if (geometry.scramble) apply_scrambler(out.bytes);
  return out;
}

DecodedUnit decode_unit(const EncodingMatrix& received, const Geometry& geometry,
                        const MatrixLayout& layout, const FileTable& table,
                        std::span<const std::vector<std::size_t>> bit_orders, int threads) {
  DecodedUnit out;
  out.recovered = recover_unit(received, geometry, layout, threads);
  const auto& bytes = out.recovered.bytes;
  if (table.total_bytes() > bytes.size()) {
    throw std::invalid_argument("file table larger than the unit capacity");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto size = static_cast<std::size_t>(table.entries[i].size);
    std::vector<std::uint8_t> chunk(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
    if (i == 0) {
      try {
        const auto dir = unpack_directory(chunk);
        out.directory_matches =
            std::equal(dir.begin(), dir.end(), table.entries.begin() + 1, table.entries.end());
        out.directory_matches = out.directory_matches && dir.size() + 1 == table.entries.size();
      } catch (const ParseError&) {
        out.directory_matches = false;
      }
      continue;
    }
    InputFile f;
    f.name = table.entries[i].name;
    const std::size_t fi = i - 1;
    if (fi < bit_orders.size() && !bit_orders[fi].empty()) {
      f.bytes = unpermute_bits(chunk, bit_orders[fi]);
    } else {
      f.bytes = std::move(chunk);
    }
    out.files.push_back(std::move(f));
  }
  return out;
}

}  // namespace dnaskew
