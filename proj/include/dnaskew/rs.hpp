#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dnaskew/gf.hpp"

namespace dnaskew {

/// Geometry of a full-length systematic RS code over GF(2^m):
/// K = 2^m - 1 symbols, the first M carry data, the last E carry parity.
class CodeSpec {
 public:
  CodeSpec(std::shared_ptr<const GaloisField> field, int parity_symbols);
  static CodeSpec make(int m, int parity_symbols);
  /// E chosen as round(fraction * K), clamped to [0, K-1].
  static CodeSpec with_redundancy(int m, double fraction);

  const GaloisField& field() const { return *field_; }
  const std::shared_ptr<const GaloisField>& field_ptr() const { return field_; }
  int m() const { return field_->m(); }
  int length() const { return static_cast<int>(field_->group_order()); }
  int data_symbols() const { return length() - parity_; }
  int parity_symbols() const { return parity_; }

 private:
  std::shared_ptr<const GaloisField> field_;
  int parity_;
};

enum class DecodeStatus { Ok, Failure };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Failure;
  /// Corrected codeword (all K symbols); on failure the received word with
  /// erased positions zeroed.
  std::vector<Symbol> codeword;
  /// Symbols changed or filled in (erasures count as filled).
  int corrected = 0;

  bool ok() const { return status == DecodeStatus::Ok; }
};

/// Systematic Reed-Solomon encoder and errors-and-erasures decoder.
///
/// Generator roots are alpha^0 .. alpha^(E-1). Codeword position j holds the
/// coefficient of x^(K-1-j), so data sits in the high-degree coefficients.
/// Decoding uses Berlekamp-Massey seeded with the erasure locator, Chien
/// search and Forney's formula, then re-checks the syndromes; it succeeds
/// whenever 2*errors + erasures <= E.
class ReedSolomon {
 public:
  explicit ReedSolomon(CodeSpec spec);

  const CodeSpec& spec() const { return spec_; }

  std::vector<Symbol> encode(std::span<const Symbol> data) const;
  /// Writes E parity symbols for `data` into `parity`.
  void encode_parity(std::span<const Symbol> data, std::span<Symbol> parity) const;

  /// `erasures` are codeword positions; duplicates are ignored. Symbol values
  /// at erased positions are never read.
  DecodeResult decode(std::span<const Symbol> received, std::span<const int> erasures) const;

  /// Syndromes r(alpha^k), k = 0..E-1.
  std::vector<Symbol> syndromes(std::span<const Symbol> word) const;

 private:
  CodeSpec spec_;
  std::vector<Symbol> generator_tail_;   // g_{E-1}, ..., g_0 (monic, leading 1 dropped)
  std::vector<Symbol> syndrome_table_;   // K x E, row j = alpha^(k*(K-1-j)); empty if too large
};

}  // namespace dnaskew
