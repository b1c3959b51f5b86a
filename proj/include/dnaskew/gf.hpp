#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnaskew {

/// One field element / RS symbol. Wide enough for m <= 16.
using Symbol = std::uint16_t;

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Read-only view of a field's tables, handed to the arithmetic kernels.
struct GfView {
  int m = 0;
  std::uint32_t group_order = 0;       // q - 1
  const Symbol* exp = nullptr;         // length 2 * (q - 1), periodic
  const Symbol* log = nullptr;         // length q, log[0] unused
  const std::uint8_t* nibbles = nullptr;  // m <= 8 only: 32 bytes per constant
};

/// GF(2^m) built from exp/log tables over the generator alpha = x.
///
/// Construction walks alpha through all q-1 nonzero elements; a polynomial
/// that is reducible or not primitive makes the walk close early and the
/// constructor throws FieldError naming the polynomial. Instances are
/// immutable and safe to share across threads.
class GaloisField {
 public:
  GaloisField(int m, std::uint32_t primitive_poly);

  static std::uint32_t default_poly(int m);
  static std::shared_ptr<const GaloisField> make(int m);
  static std::shared_ptr<const GaloisField> make(int m, std::uint32_t primitive_poly);

  int m() const { return m_; }
  std::uint32_t poly() const { return poly_; }
  std::uint32_t order() const { return group_order_ + 1; }
  std::uint32_t group_order() const { return group_order_; }

  Symbol add(Symbol a, Symbol b) const { return a ^ b; }
  Symbol mul(Symbol a, Symbol b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Symbol div(Symbol a, Symbol b) const;
  Symbol inv(Symbol a) const;
  /// alpha^e for any integer e (negative exponents allowed).
  Symbol alpha_pow(long long e) const;
  Symbol exp(std::uint32_t i) const { return exp_[i % group_order_]; }
  std::uint32_t log(Symbol a) const;

  GfView view() const;

 private:
  int m_;
  std::uint32_t poly_;
  std::uint32_t group_order_;
  std::vector<Symbol> exp_;
  std::vector<Symbol> log_;
  std::vector<std::uint8_t> nibbles_;
};

}  // namespace dnaskew
