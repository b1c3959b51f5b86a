#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dnaskew/layout.hpp"
#include "test_util.hpp"

using namespace dnaskew;

namespace {

MatrixLayout make(Strategy s, const CodeSpec& spec, int rows) {
  switch (s) {
    case Strategy::Baseline: return MatrixLayout::baseline(spec, rows);
    case Strategy::Gini: return MatrixLayout::gini(spec, rows);
    case Strategy::DnaMapper: {
      const std::size_t per_row = static_cast<std::size_t>(spec.data_symbols()) * static_cast<std::size_t>(spec.field().m());
      const std::vector<std::size_t> caps(static_cast<std::size_t>(rows), per_row);
      const std::vector<std::size_t> files = {per_row * rows / 3, per_row * rows - per_row * rows / 3};
      return MatrixLayout::dna_mapper(spec, rows, rank_bits_positional(files, caps));
    }
  }
  return MatrixLayout::baseline(spec, rows);
}

constexpr Strategy kAll[] = {Strategy::Baseline, Strategy::Gini, Strategy::DnaMapper};

}  // namespace

TEST_CASE("strategy names") {
  for (Strategy s : kAll) CHECK(parse_strategy(to_string(s)) == s);
  CHECK(to_string(Strategy::DnaMapper) == "dnamapper");
  CHECK_THROWS(parse_strategy("diagonal"));
}

TEST_CASE("cell_of and cell_owner are inverse bijections") {
  const CodeSpec spec = CodeSpec::make(8, 47);
  for (Strategy s : kAll) {
    const MatrixLayout lay = make(s, spec, 21);
    std::set<std::pair<int, int>> cells;
    for (int c = 0; c < lay.codewords(); ++c) {
      for (int j = 0; j < lay.cols(); ++j) {
        const Cell cell = lay.cell_of(c, j);
        cells.insert({cell.row, cell.col});
        REQUIRE(lay.cell_owner(cell.row, cell.col) == CellOwner{c, j});
      }
    }
    CHECK(cells.size() == static_cast<std::size_t>(21 * 255));
  }
}

TEST_CASE("gini codewords visit every row evenly") {
  const CodeSpec spec = CodeSpec::make(8, 47);
  const MatrixLayout g = MatrixLayout::gini(spec, 21);
  for (int c = 0; c < 21; ++c) {
    std::vector<int> per_row(21, 0);
    for (const Cell& cell : g.codeword_cells(c)) ++per_row[static_cast<std::size_t>(cell.row)];
    const auto [lo, hi] = std::minmax_element(per_row.begin(), per_row.end());
    CHECK(*lo == 255 / 21);
    CHECK(*hi == 255 / 21 + 1);
  }
  // Diagonal placement: symbol j of codeword c at row (c+j) mod R, column j.
  CHECK(g.cell_of(3, 20) == Cell{(3 + 20) % 21, 20});
}

TEST_CASE("gini reserved rows stay plain rows") {
  const CodeSpec spec = CodeSpec::make(8, 47);
  const MatrixLayout g = MatrixLayout::gini(spec, 6, {0});
  for (int j = 0; j < g.cols(); ++j) CHECK(g.cell_owner(0, j).codeword == g.cell_owner(0, 0).codeword);
  for (int c = 0; c < 6; ++c) {
    const auto cells = g.codeword_cells(c);
    const bool on_row0 = std::any_of(cells.begin(), cells.end(), [](const Cell& x) { return x.row == 0; });
    const bool all_row0 = std::all_of(cells.begin(), cells.end(), [](const Cell& x) { return x.row == 0; });
    CHECK(on_row0 == all_row0);
  }
}

TEST_CASE("dnamapper row order: last, first, second to last, second, ...") {
  const CodeSpec spec = CodeSpec::make(4, 4);
  const MatrixLayout d = make(Strategy::DnaMapper, spec, 5);
  std::vector<int> order;
  for (int k = 0; k < 5; ++k) order.push_back(d.row_of_class(k));
  CHECK(order == std::vector<int>{4, 0, 3, 1, 2});
}

TEST_CASE("build then extract returns the payload for every strategy") {
  std::mt19937_64 rng(1);
  for (auto [m, e, r] : {std::tuple{8, 47, 21}, {4, 4, 6}, {6, 9, 5}}) {
    const CodeSpec spec = CodeSpec::make(m, e);
    for (Strategy s : kAll) {
      const MatrixLayout lay = make(s, spec, r);
      const std::size_t cap = lay.data_capacity_bits() / 8;
      const auto payload = testutil::random_bytes(cap, rng());
      const EncodingMatrix mat = lay.build_matrix(payload);
      auto back = lay.extract_data(mat);
      back.resize(cap);
      REQUIRE(back == payload);
      for (int c = 0; c < lay.codewords(); ++c) {
        for (Symbol syn : lay.codec().syndromes(lay.gather_codeword(mat, c))) REQUIRE(syn == 0);
      }
      const auto rec = lay.recover_payload(mat);
      CHECK(rec.report.success());
      CHECK(std::equal(payload.begin(), payload.end(), rec.bytes.begin()));
    }
  }
}

TEST_CASE("oversized payload throws CapacityError") {
  const MatrixLayout lay = MatrixLayout::baseline(CodeSpec::make(4, 4), 3);
  const std::vector<std::uint8_t> big(lay.data_capacity_bits() / 8 + 1, 0);
  CHECK_THROWS_AS(lay.build_matrix(big), CapacityError);
}

TEST_CASE("a dropped column costs each baseline and gini codeword one erasure") {
  const CodeSpec spec = CodeSpec::make(8, 47);
  std::mt19937_64 rng(2);
  for (Strategy s : {Strategy::Baseline, Strategy::Gini}) {
    const MatrixLayout lay = make(s, spec, 21);
    for (int col : {0, 17, 254}) {
      std::vector<int> hits(21, 0);
      for (int r = 0; r < 21; ++r) ++hits[static_cast<std::size_t>(lay.cell_owner(r, col).codeword)];
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    const auto payload = testutil::random_bytes(lay.data_capacity_bits() / 8, rng());
    EncodingMatrix mat = lay.build_matrix(payload);
    std::vector<int> cols(255);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    for (int i = 0; i < 47; ++i) {
      const int c = cols[static_cast<std::size_t>(i)];
      mat.erased_columns[static_cast<std::size_t>(c)] = true;
      for (int r = 0; r < 21; ++r) mat.at(r, c) = 0;
    }
    const auto rec = lay.recover_payload(mat);
    REQUIRE(rec.report.success());
    for (const auto& cw : rec.report.codewords) CHECK(cw.erasures == 47);
    CHECK(std::equal(payload.begin(), payload.end(), rec.bytes.begin()));
  }
}

TEST_CASE("strands to matrix and back") {
  const CodeSpec spec = CodeSpec::make(8, 47);
  const MatrixLayout lay = MatrixLayout::gini(spec, 21);
  const StrandLayout sl = StrandLayout::make(8, 21, false);
  const auto payload = testutil::random_bytes(lay.data_capacity_bits() / 8, 3);
  const EncodingMatrix mat = lay.build_matrix(payload);
  const auto strands = matrix_to_strands(mat, sl);
  REQUIRE(strands.size() == 255);
  std::vector<ParsedStrand> parsed;
  for (const auto& s : strands) {
    if (s.column == 9) continue;
    parsed.push_back(parse_strand(sl, s.bases));
  }
  const auto cols = resolve_columns(parsed, 255);
  const EncodingMatrix back = strands_to_matrix(cols, lay);
  CHECK(back.erased() == std::vector<int>{9});
  for (int c = 0; c < 255; ++c) {
    if (c == 9) continue;
    CHECK(back.column(c) == mat.column(c));
  }
}

TEST_CASE("conflicting duplicate indices erase the column") {
  ParsedStrand a{StrandStatus::Ok, 3, {1, 2}};
  ParsedStrand b{StrandStatus::Ok, 3, {1, 2}};
  ParsedStrand c{StrandStatus::Ok, 4, {5, 6}};
  ParsedStrand d{StrandStatus::Ok, 4, {7, 8}};
  ParsedStrand bad{StrandStatus::InvalidBase, -1, {}};
  const std::vector<ParsedStrand> v = {a, b, c, d, bad};
  const auto cols = resolve_columns(v, 255);
  CHECK(cols.size() == 1);
  CHECK(cols.count(3) == 1);
}

TEST_CASE("matrix dump has a header and R rows of K hex symbols") {
  const MatrixLayout lay = MatrixLayout::baseline(CodeSpec::make(4, 4), 3);
  const EncodingMatrix mat = lay.build_matrix(std::vector<std::uint8_t>(4, 0xAB));
  std::ostringstream os;
  dump_matrix(os, mat, lay);
  std::istringstream is(os.str());
  std::string line;
  int header = 0, rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) {
      ++header;
      continue;
    }
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 14);
  }
  CHECK(header >= 1);
  CHECK(rows == 3);
}
