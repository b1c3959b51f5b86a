#include "dnaskew/layout.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dnaskew/parallel.hpp"

namespace dnaskew {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Baseline: return "baseline";
    case Strategy::Gini: return "gini";
    case Strategy::DnaMapper: return "dnamapper";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "baseline") return Strategy::Baseline;
  if (name == "gini") return Strategy::Gini;
  if (name == "dnamapper") return Strategy::DnaMapper;
  throw std::invalid_argument("unknown strategy '" + name + "' (baseline|gini|dnamapper)");
}

std::vector<Symbol> EncodingMatrix::column(int c) const {
  std::vector<Symbol> out(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) out[static_cast<std::size_t>(r)] = at(r, c);
  return out;
}

std::vector<int> EncodingMatrix::erased() const {
  std::vector<int> out;
  for (int c = 0; c < cols; ++c) {
    if (erased_columns[static_cast<std::size_t>(c)]) out.push_back(c);
  }
  return out;
}

int RecoveryReport::failed() const {
  return static_cast<int>(std::count_if(codewords.begin(), codewords.end(),
                                        [](const CodewordStatus& s) { return !s.ok; }));
}

MatrixLayout::MatrixLayout(Strategy s, const CodeSpec& spec, int rows)
    : strategy_(s), codec_(std::make_shared<const ReedSolomon>(spec)), rows_(rows) {
  if (rows < 1) throw std::invalid_argument("matrix needs at least one row");
}

MatrixLayout MatrixLayout::baseline(const CodeSpec& spec, int rows) {
  return MatrixLayout(Strategy::Baseline, spec, rows);
}

MatrixLayout MatrixLayout::gini(const CodeSpec& spec, int rows, std::vector<int> reserved_rows) {
  MatrixLayout l(Strategy::Gini, spec, rows);
  std::sort(reserved_rows.begin(), reserved_rows.end());
  reserved_rows.erase(std::unique(reserved_rows.begin(), reserved_rows.end()), reserved_rows.end());
  for (int r : reserved_rows) {
    if (r < 0 || r >= rows) {
      throw std::invalid_argument("reserved row " + std::to_string(r) + " outside [0," +
                                  std::to_string(rows) + ")");
    }
  }
  l.reserved_ = std::move(reserved_rows);
  l.diag_index_.assign(static_cast<std::size_t>(rows), -1);
  for (int r = 0; r < rows; ++r) {
    if (!std::binary_search(l.reserved_.begin(), l.reserved_.end(), r)) {
      l.diag_index_[static_cast<std::size_t>(r)] = static_cast<int>(l.diag_rows_.size());
      l.diag_rows_.push_back(r);
    }
  }
  return l;
}

MatrixLayout MatrixLayout::dna_mapper(const CodeSpec& spec, int rows, BitRanking ranking) {
  MatrixLayout l(Strategy::DnaMapper, spec, rows);
  const std::size_t per_class =
      static_cast<std::size_t>(spec.data_symbols()) * static_cast<std::size_t>(spec.m());
  if (ranking.class_count() != rows) {
    throw std::invalid_argument("ranking has " + std::to_string(ranking.class_count()) +
                                " classes, matrix has " + std::to_string(rows) + " rows");
  }
  for (std::size_t c : ranking.class_capacities()) {
    if (c != per_class) {
      throw std::invalid_argument("every reliability class must hold M*m = " +
                                  std::to_string(per_class) + " bits");
    }
  }
  l.ranking_ = std::make_shared<const BitRanking>(std::move(ranking));
  return l;
}

std::size_t MatrixLayout::data_capacity_bits() const {
  return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(spec().data_symbols()) *
         static_cast<std::size_t>(spec().m());
}

std::size_t MatrixLayout::parity_bits() const {
  return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(spec().parity_symbols()) *
         static_cast<std::size_t>(spec().m());
}

CellOwner MatrixLayout::cell_owner(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols()) {
    throw std::invalid_argument("cell (" + std::to_string(row) + "," + std::to_string(col) +
                                ") outside the matrix");
  }
  if (strategy_ != Strategy::Gini) return CellOwner{row, col};
  const int i = diag_index_[static_cast<std::size_t>(row)];
  if (i < 0) return CellOwner{row, col};
  const int n = static_cast<int>(diag_rows_.size());
  const int c = ((i - col) % n + n) % n;
  return CellOwner{diag_rows_[static_cast<std::size_t>(c)], col};
}

Cell MatrixLayout::cell_of(int codeword, int symbol) const {
  if (codeword < 0 || codeword >= rows_ || symbol < 0 || symbol >= cols()) {
    throw std::invalid_argument("codeword " + std::to_string(codeword) + " symbol " +
                                std::to_string(symbol) + " out of range");
  }
  if (strategy_ != Strategy::Gini) return Cell{codeword, symbol};
  const int c = diag_index_[static_cast<std::size_t>(codeword)];
  if (c < 0) return Cell{codeword, symbol};
  const std::size_t n = diag_rows_.size();
  return Cell{diag_rows_[(static_cast<std::size_t>(c) + static_cast<std::size_t>(symbol)) % n], symbol};
}

std::vector<Cell> MatrixLayout::codeword_cells(int codeword) const {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(cols()));
  for (int j = 0; j < cols(); ++j) out.push_back(cell_of(codeword, j));
  return out;
}

int MatrixLayout::row_of_class(int rank) const {
  if (rank < 0 || rank >= rows_) throw std::invalid_argument("class rank out of range");
  return (rank % 2 == 0) ? rows_ - 1 - rank / 2 : (rank - 1) / 2;
}

Cell MatrixLayout::data_symbol_cell(std::size_t s) const {
  const std::size_t m_data = static_cast<std::size_t>(spec().data_symbols());
  if (strategy_ == Strategy::Gini) {
    return cell_of(static_cast<int>(s / m_data), static_cast<int>(s % m_data));
  }
  const std::size_t r = static_cast<std::size_t>(rows_);
  return Cell{static_cast<int>(s % r), static_cast<int>(s / r)};
}

MatrixLayout::BitPlace MatrixLayout::place_bit(std::size_t payload_bit) const {
  const int m = spec().m();
  if (strategy_ == Strategy::DnaMapper) {
    const ClassSlot slot = ranking_->assignment(payload_bit);
    const std::size_t m_data = static_cast<std::size_t>(spec().data_symbols());
    return BitPlace{Cell{row_of_class(slot.class_rank), static_cast<int>(slot.position % m_data)},
                    static_cast<int>(slot.position / m_data)};
  }
  return BitPlace{data_symbol_cell(payload_bit / static_cast<std::size_t>(m)),
                  static_cast<int>(payload_bit % static_cast<std::size_t>(m))};
}

std::vector<Symbol> MatrixLayout::gather_codeword(const EncodingMatrix& matrix, int codeword) const {
  std::vector<Symbol> word(static_cast<std::size_t>(cols()));
  for (int j = 0; j < cols(); ++j) {
    const Cell c = cell_of(codeword, j);
    word[static_cast<std::size_t>(j)] = matrix.at(c.row, c.col);
  }
  return word;
}

EncodingMatrix MatrixLayout::build_matrix(std::span<const std::uint8_t> payload) const {
  const std::size_t capacity = data_capacity_bits();
  const std::size_t nbits = payload.size() * 8;
  if (nbits > capacity) throw CapacityError(nbits, capacity);
  const int m = spec().m();
  EncodingMatrix matrix(rows_, cols());

  if (strategy_ == Strategy::DnaMapper) {
    const std::size_t m_data = static_cast<std::size_t>(spec().data_symbols());
    for (const RankSegment& seg : ranking_->segments()) {
      if (seg.payload_offset >= nbits) break;
      const int row = row_of_class(seg.class_rank);
      const std::size_t end = std::min(seg.count, nbits - seg.payload_offset);
      for (std::size_t i = 0; i < end; ++i) {
        if (!codec::get_bit(payload, seg.payload_offset + i)) continue;
        const std::size_t pos = seg.class_offset + i;
        const int col = static_cast<int>(pos % m_data);
        const int bit = static_cast<int>(pos / m_data);
        matrix.at(row, col) |= static_cast<Symbol>(1u << (m - 1 - bit));
      }
    }
  } else {
    const std::size_t symbols = capacity / static_cast<std::size_t>(m);
    for (std::size_t s = 0; s < symbols; ++s) {
      const std::size_t first = s * static_cast<std::size_t>(m);
      if (first >= nbits) break;
      unsigned v = 0;
      for (int b = 0; b < m; ++b) {
        const std::size_t i = first + static_cast<std::size_t>(b);
        v = (v << 1) | ((i < nbits && codec::get_bit(payload, i)) ? 1u : 0u);
      }
      const Cell c = data_symbol_cell(s);
      matrix.at(c.row, c.col) = static_cast<Symbol>(v);
    }
  }

  const int m_data = spec().data_symbols();
  const int e = spec().parity_symbols();
  std::vector<Symbol> data(static_cast<std::size_t>(m_data));
  std::vector<Symbol> parity(static_cast<std::size_t>(e));
  for (int cw = 0; cw < rows_; ++cw) {
    for (int j = 0; j < m_data; ++j) {
      const Cell c = cell_of(cw, j);
      data[static_cast<std::size_t>(j)] = matrix.at(c.row, c.col);
    }
    codec_->encode_parity(data, parity);
    for (int j = 0; j < e; ++j) {
      const Cell c = cell_of(cw, m_data + j);
      matrix.at(c.row, c.col) = parity[static_cast<std::size_t>(j)];
    }
  }
  return matrix;
}

std::vector<std::uint8_t> MatrixLayout::extract_data(const EncodingMatrix& matrix) const {
  const std::size_t capacity = data_capacity_bits();
  const int m = spec().m();
  std::vector<std::uint8_t> out(capacity / 8, 0);
  const std::size_t out_bits = out.size() * 8;
  if (strategy_ == Strategy::DnaMapper) {
    const std::size_t m_data = static_cast<std::size_t>(spec().data_symbols());
    for (const RankSegment& seg : ranking_->segments()) {
      if (seg.payload_offset >= out_bits) break;
      const int row = row_of_class(seg.class_rank);
      const std::size_t end = std::min(seg.count, out_bits - seg.payload_offset);
      for (std::size_t i = 0; i < end; ++i) {
        const std::size_t pos = seg.class_offset + i;
        const Symbol v = matrix.at(row, static_cast<int>(pos % m_data));
        const int bit = static_cast<int>(pos / m_data);
        if ((v >> (m - 1 - bit)) & 1u) codec::set_bit(out, seg.payload_offset + i, true);
      }
    }
    return out;
  }
  const std::size_t symbols = capacity / static_cast<std::size_t>(m);
  for (std::size_t s = 0; s < symbols; ++s) {
    const Cell c = data_symbol_cell(s);
    const Symbol v = matrix.at(c.row, c.col);
    for (int b = 0; b < m; ++b) {
      const std::size_t i = s * static_cast<std::size_t>(m) + static_cast<std::size_t>(b);
      if (i >= out_bits) break;
      if ((v >> (m - 1 - b)) & 1u) codec::set_bit(out, i, true);
    }
  }
  return out;
}

RecoveredPayload MatrixLayout::recover_payload(const EncodingMatrix& matrix, int threads) const {
  if (matrix.rows != rows_ || matrix.cols != cols()) {
    throw std::invalid_argument("matrix geometry does not match layout");
  }
  const std::vector<int> erasures = matrix.erased();
  EncodingMatrix fixed = matrix;
  RecoveredPayload out;
  out.report.codewords.resize(static_cast<std::size_t>(rows_));
  parallel_for(static_cast<std::size_t>(rows_), threads, [&](std::size_t idx) {
    const int cw = static_cast<int>(idx);
    const std::vector<Symbol> word = gather_codeword(matrix, cw);
    const DecodeResult res = codec_->decode(word, erasures);
    CodewordStatus& st = out.report.codewords[idx];
    st.codeword = cw;
    st.ok = res.ok();
    st.corrected = res.corrected;
    st.erasures = static_cast<int>(erasures.size());
    for (int j = 0; j < cols(); ++j) {
      const Cell c = cell_of(cw, j);
      fixed.at(c.row, c.col) = res.codeword[static_cast<std::size_t>(j)];
    }
  });
  out.bytes = extract_data(fixed);
  return out;
}

std::string MatrixLayout::describe() const {
  std::ostringstream os;
  os << to_string(strategy_);
  if (strategy_ == Strategy::Gini && !reserved_.empty()) {
    os << "(reserved=";
    for (std::size_t i = 0; i < reserved_.size(); ++i) os << (i ? ";" : "") << reserved_[i];
    os << ")";
  }
  return os.str();
}

std::vector<Strand> matrix_to_strands(const EncodingMatrix& matrix, const StrandLayout& layout) {
  if (layout.rows != matrix.rows) throw std::invalid_argument("strand layout rows != matrix rows");
  std::vector<Strand> out;
  out.reserve(static_cast<std::size_t>(matrix.cols));
  for (int c = 0; c < matrix.cols; ++c) out.push_back(assemble_strand(layout, c, matrix.column(c)));
  return out;
}

EncodingMatrix strands_to_matrix(const std::map<int, std::vector<Symbol>>& columns,
                                 const MatrixLayout& layout) {
  EncodingMatrix matrix(layout.rows(), layout.cols());
  std::fill(matrix.erased_columns.begin(), matrix.erased_columns.end(), true);
  for (const auto& [col, symbols] : columns) {
    if (col < 0 || col >= matrix.cols) {
      throw std::invalid_argument("column index " + std::to_string(col) + " out of range");
    }
    if (static_cast<int>(symbols.size()) != matrix.rows) {
      throw std::invalid_argument("column payload has wrong number of symbols");
    }
    for (int r = 0; r < matrix.rows; ++r) matrix.at(r, col) = symbols[static_cast<std::size_t>(r)];
    matrix.erased_columns[static_cast<std::size_t>(col)] = false;
  }
  return matrix;
}

std::map<int, std::vector<Symbol>> resolve_columns(std::span<const ParsedStrand> parsed, int column_limit) {
  std::map<int, std::vector<Symbol>> out;
  std::set<int> conflicted;
  for (const ParsedStrand& p : parsed) {
    if (!p.ok() || p.column < 0 || p.column >= column_limit) continue;
    if (conflicted.count(p.column)) continue;
    auto it = out.find(p.column);
    if (it == out.end()) {
      out.emplace(p.column, p.payload);
    } else if (it->second != p.payload) {
      out.erase(it);
      conflicted.insert(p.column);
    }
  }
  return out;
}

void dump_matrix(std::ostream& os, const EncodingMatrix& matrix, const MatrixLayout& layout) {
  const CodeSpec& spec = layout.spec();
  os << "# strategy=" << layout.describe() << ",m=" << spec.m() << ",K=" << spec.length()
     << ",M=" << spec.data_symbols() << ",E=" << spec.parity_symbols() << ",R=" << layout.rows()
     << "\n";
  const int width = (spec.m() + 3) / 4;
  std::ostringstream line;
  for (int r = 0; r < matrix.rows; ++r) {
    line.str("");
    line << std::hex << std::setfill('0');
    for (int c = 0; c < matrix.cols; ++c) {
      if (c) line << ',';
      line << std::setw(width) << matrix.at(r, c);
    }
    os << line.str() << "\n";
  }
}

}  // namespace dnaskew
