#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dnaskew/codec.hpp"
#include "dnaskew/priority.hpp"
#include "dnaskew/rs.hpp"

namespace dnaskew {

enum class Strategy { Baseline, Gini, DnaMapper };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

struct CellOwner {
  int codeword = 0;
  int symbol = 0;
  bool operator==(const CellOwner&) const = default;
};

/// R x K grid of symbols. Column k is molecule k; erased columns were not
/// recovered from sequencing and hold placeholder 0.
struct EncodingMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Symbol> cells;         // row-major
  std::vector<bool> erased_columns;  // size cols

  EncodingMatrix() = default;
  EncodingMatrix(int r, int c) : rows(r), cols(c), cells(static_cast<std::size_t>(r) * c, 0), erased_columns(static_cast<std::size_t>(c), false) {}

  Symbol& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
  Symbol at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
  std::vector<Symbol> column(int c) const;
  std::vector<int> erased() const;
};

/// Per-codeword outcome of recover_payload.
struct CodewordStatus {
  int codeword = 0;
  bool ok = true;
  int corrected = 0;
  int erasures = 0;
};

struct RecoveryReport {
  std::vector<CodewordStatus> codewords;
  int failed() const;
  bool success() const { return failed() == 0; }
};

struct RecoveredPayload {
  std::vector<std::uint8_t> bytes;  // capacity_bits / 8 bytes
  RecoveryReport report;
};

/// Placement of codewords and data bits in the encoding matrix.
///
/// Baseline: codeword r is row r, data fills columns 0..M-1 molecule by
/// molecule. Gini: codewords run along wrapped diagonals over the
/// non-reserved rows (codeword c, symbol j at row r[(c+j) mod R'], column j);
/// reserved rows stay plain rows. DnaMapper: rows are codewords as in
/// Baseline, but data bits are placed by a BitRanking into rows ordered by
/// reliability (last row, first row, second-to-last, second, ...), striped
/// across the M data columns of each row.
class MatrixLayout {
 public:
  static MatrixLayout baseline(const CodeSpec& spec, int rows);
  static MatrixLayout gini(const CodeSpec& spec, int rows, std::vector<int> reserved_rows = {});
  static MatrixLayout dna_mapper(const CodeSpec& spec, int rows, BitRanking ranking);

  Strategy strategy() const { return strategy_; }
  const CodeSpec& spec() const { return codec_->spec(); }
  const ReedSolomon& codec() const { return *codec_; }
  int rows() const { return rows_; }
  int cols() const { return spec().length(); }
  int codewords() const { return rows_; }
  const std::vector<int>& reserved_rows() const { return reserved_; }
  const BitRanking* ranking() const { return ranking_.get(); }
  std::size_t data_capacity_bits() const;
  std::size_t parity_bits() const;

  CellOwner cell_owner(int row, int col) const;
  Cell cell_of(int codeword, int symbol) const;
  std::vector<Cell> codeword_cells(int codeword) const;

  /// Row holding reliability class `rank` (0 = most reliable) under DnaMapper.
  int row_of_class(int rank) const;

  /// Zero-pads the payload to capacity and computes parity per codeword.
  /// Throws CapacityError when the payload does not fit.
  EncodingMatrix build_matrix(std::span<const std::uint8_t> payload) const;
  /// Reads data cells back in payload order without decoding.
  std::vector<std::uint8_t> extract_data(const EncodingMatrix& matrix) const;
  /// Decodes every codeword (erasures = erased columns) and reassembles the
  /// payload. Failed codewords pass their received data symbols through.
  RecoveredPayload recover_payload(const EncodingMatrix& matrix, int threads = 1) const;

  std::vector<Symbol> gather_codeword(const EncodingMatrix& matrix, int codeword) const;

  /// One-line description used in dumps and manifests.
  std::string describe() const;

 private:
  MatrixLayout(Strategy s, const CodeSpec& spec, int rows);

  // Symbol `s` of the Baseline/Gini data stream -> cell.
  Cell data_symbol_cell(std::size_t s) const;
  struct BitPlace {
    Cell cell;
    int bit;  // 0 = most significant
  };
  BitPlace place_bit(std::size_t payload_bit) const;

  Strategy strategy_;
  std::shared_ptr<const ReedSolomon> codec_;
  int rows_;
  std::vector<int> reserved_;
  std::vector<int> diag_rows_;   // non-reserved rows ascending
  std::vector<int> diag_index_;  // row -> index in diag_rows_, -1 if reserved
  std::shared_ptr<const BitRanking> ranking_;
};

std::vector<Strand> matrix_to_strands(const EncodingMatrix& matrix, const StrandLayout& layout);

/// Reconstructed column payloads keyed by column index; missing columns
/// become erasures.
EncodingMatrix strands_to_matrix(const std::map<int, std::vector<Symbol>>& columns,
                                 const MatrixLayout& layout);

/// Resolves parsed strands into a column map. Duplicate indices keep the
/// first payload; a later, different payload for the same index marks the
/// column erased (it is left out of the map).
std::map<int, std::vector<Symbol>> resolve_columns(std::span<const ParsedStrand> parsed, int column_limit);

/// CSV dump: a '#' header naming strategy and code, then R lines of K hex symbols.
void dump_matrix(std::ostream& os, const EncodingMatrix& matrix, const MatrixLayout& layout);

}  // namespace dnaskew
