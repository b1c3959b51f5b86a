#include "dnaskew/gf.hpp"

#include <sstream>

namespace dnaskew {

namespace {

std::string hex(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::uppercase << v;
  return os.str();
}

}  // namespace

std::uint32_t GaloisField::default_poly(int m) {
  switch (m) {
    case 2: return 0x7;
    case 3: return 0xB;
    case 4: return 0x13;
    case 5: return 0x25;
    case 6: return 0x43;
    case 7: return 0x89;
    case 8: return 0x11D;
    case 9: return 0x211;
    case 10: return 0x409;
    case 11: return 0x805;
    case 12: return 0x1053;
    case 13: return 0x201B;
    case 14: return 0x4443;
    case 15: return 0x8003;
    case 16: return 0x1100B;
    default: throw FieldError("symbol width m=" + std::to_string(m) + " outside 2..16");
  }
}

std::shared_ptr<const GaloisField> GaloisField::make(int m) {
  return std::make_shared<const GaloisField>(m, default_poly(m));
}

std::shared_ptr<const GaloisField> GaloisField::make(int m, std::uint32_t primitive_poly) {
  return std::make_shared<const GaloisField>(m, primitive_poly);
}

GaloisField::GaloisField(int m, std::uint32_t primitive_poly) : m_(m), poly_(primitive_poly) {
  if (m < 2 || m > 16) {
    throw FieldError("symbol width m=" + std::to_string(m) + " outside 2..16");
  }
  const std::uint32_t q = 1u << m;
  if ((primitive_poly >> m) != 1u) {
    throw FieldError("polynomial " + hex(primitive_poly) + " does not have degree " +
                     std::to_string(m));
  }
  group_order_ = q - 1;
  exp_.assign(2 * static_cast<std::size_t>(group_order_), 0);
  log_.assign(q, 0);

  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < group_order_; ++i) {
    if (i > 0 && x == 1) {
      throw FieldError("polynomial " + hex(primitive_poly) + " is not primitive: alpha has order " +
                       std::to_string(i));
    }
    exp_[i] = static_cast<Symbol>(x);
    log_[x] = static_cast<Symbol>(i);
    x <<= 1;
    if (x & q) x ^= primitive_poly;
  }
  if (x != 1) {
    throw FieldError("polynomial " + hex(primitive_poly) + " is not primitive");
  }
  for (std::uint32_t i = group_order_; i < exp_.size(); ++i) exp_[i] = exp_[i - group_order_];

  if (m <= 8) {
    // Split-nibble product tables: [c][0..15] = c*lo, [c][16..31] = c*(hi<<4).
    nibbles_.assign(static_cast<std::size_t>(q) * 32, 0);
    for (std::uint32_t c = 0; c < q; ++c) {
      for (std::uint32_t n = 0; n < 16; ++n) {
        const Symbol lo = n < q ? mul(static_cast<Symbol>(c), static_cast<Symbol>(n)) : 0;
        const Symbol hi = (n << 4) < q ? mul(static_cast<Symbol>(c), static_cast<Symbol>(n << 4)) : 0;
        nibbles_[c * 32 + n] = static_cast<std::uint8_t>(lo);
        nibbles_[c * 32 + 16 + n] = static_cast<std::uint8_t>(hi);
      }
    }
  }
}

Symbol GaloisField::div(Symbol a, Symbol b) const {
  if (b == 0) throw std::domain_error("division by zero in GF(2^" + std::to_string(m_) + ")");
  if (a == 0) return 0;
  return exp_[log_[a] + group_order_ - log_[b]];
}

Symbol GaloisField::inv(Symbol a) const { return div(1, a); }

Symbol GaloisField::alpha_pow(long long e) const {
  long long r = e % static_cast<long long>(group_order_);
  if (r < 0) r += group_order_;
  return exp_[static_cast<std::size_t>(r)];
}

std::uint32_t GaloisField::log(Symbol a) const {
  if (a == 0) throw std::domain_error("log of zero");
  return log_[a];
}

GfView GaloisField::view() const {
  GfView v;
  v.m = m_;
  v.group_order = group_order_;
  v.exp = exp_.data();
  v.log = log_.data();
  v.nibbles = nibbles_.empty() ? nullptr : nibbles_.data();
  return v;
}

}  // namespace dnaskew
