#include "dnaskew/rs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dnaskew/kernels.hpp"

namespace dnaskew {

namespace {

constexpr std::size_t kSyndromeTableLimit = std::size_t{1} << 21;

}  // namespace

CodeSpec::CodeSpec(std::shared_ptr<const GaloisField> field, int parity_symbols)
    : field_(std::move(field)), parity_(parity_symbols) {
  if (!field_) throw std::invalid_argument("CodeSpec needs a field");
  if (parity_ < 0 || parity_ >= length()) {
    throw std::invalid_argument("parity symbols E=" + std::to_string(parity_) +
                                " must satisfy 0 <= E < K=" + std::to_string(length()));
  }
}

CodeSpec CodeSpec::make(int m, int parity_symbols) {
  return CodeSpec(GaloisField::make(m), parity_symbols);
}

CodeSpec CodeSpec::with_redundancy(int m, double fraction) {
  auto field = GaloisField::make(m);
  const int k = static_cast<int>(field->group_order());
  int e = static_cast<int>(std::lround(fraction * k));
  e = std::clamp(e, 0, k - 1);
  return CodeSpec(std::move(field), e);
}

ReedSolomon::ReedSolomon(CodeSpec spec) : spec_(std::move(spec)) {
  const GaloisField& f = spec_.field();
  const int e = spec_.parity_symbols();
  const int k = spec_.length();

  // g(x) = prod_{i<E} (x - alpha^i), stored low degree first.
  std::vector<Symbol> g{1};
  for (int i = 0; i < e; ++i) {
    const Symbol root = f.alpha_pow(i);
    std::vector<Symbol> next(g.size() + 1, 0);
    for (std::size_t d = 0; d < g.size(); ++d) {
      next[d + 1] ^= g[d];
      next[d] ^= f.mul(g[d], root);
    }
    g = std::move(next);
  }
  generator_tail_.resize(static_cast<std::size_t>(e));
  for (int j = 0; j < e; ++j) generator_tail_[j] = g[static_cast<std::size_t>(e - 1 - j)];

  if (static_cast<std::size_t>(k) * static_cast<std::size_t>(e) <= kSyndromeTableLimit) {
    syndrome_table_.resize(static_cast<std::size_t>(k) * e);
    for (int j = 0; j < k; ++j) {
      const long long deg = k - 1 - j;
      for (int s = 0; s < e; ++s) {
        syndrome_table_[static_cast<std::size_t>(j) * e + s] = f.alpha_pow(deg * s);
      }
    }
  }
}

void ReedSolomon::encode_parity(std::span<const Symbol> data, std::span<Symbol> parity) const {
  const int e = spec_.parity_symbols();
  if (static_cast<int>(data.size()) != spec_.data_symbols()) {
    throw std::invalid_argument("rs_encode expects " + std::to_string(spec_.data_symbols()) +
                                " data symbols, got " + std::to_string(data.size()));
  }
  if (static_cast<int>(parity.size()) != e) {
    throw std::invalid_argument("parity buffer must hold E symbols");
  }
  const std::uint32_t q = spec_.field().order();
  std::fill(parity.begin(), parity.end(), Symbol{0});
  if (e == 0) {
    for (Symbol d : data) {
      if (d >= q) throw std::invalid_argument("data symbol out of field range");
    }
    return;
  }
  const GfView view = spec_.field().view();
  const auto& kern = kernels::active();
  for (Symbol d : data) {
    if (d >= q) throw std::invalid_argument("data symbol out of field range");
    const Symbol feedback = d ^ parity[0];
    std::copy(parity.begin() + 1, parity.end(), parity.begin());
    parity[static_cast<std::size_t>(e - 1)] = 0;
    kern.gf_mul_add(view, feedback, generator_tail_.data(), parity.data(), static_cast<std::size_t>(e));
  }
}

std::vector<Symbol> ReedSolomon::encode(std::span<const Symbol> data) const {
  std::vector<Symbol> word(static_cast<std::size_t>(spec_.length()));
  const std::size_t m = static_cast<std::size_t>(spec_.data_symbols());
  if (data.size() == m) std::copy(data.begin(), data.end(), word.begin());
  encode_parity(data, std::span<Symbol>(word).subspan(m));
  return word;
}

std::vector<Symbol> ReedSolomon::syndromes(std::span<const Symbol> word) const {
  const int e = spec_.parity_symbols();
  const int k = spec_.length();
  std::vector<Symbol> s(static_cast<std::size_t>(e), 0);
  if (e == 0) return s;
  const GaloisField& f = spec_.field();
  if (!syndrome_table_.empty()) {
    const GfView view = f.view();
    const auto& kern = kernels::active();
    for (int j = 0; j < k; ++j) {
      const Symbol r = word[static_cast<std::size_t>(j)];
      if (r != 0) {
        kern.gf_mul_add(view, r, syndrome_table_.data() + static_cast<std::size_t>(j) * e, s.data(),
                        static_cast<std::size_t>(e));
      }
    }
    return s;
  }
  for (int i = 0; i < e; ++i) {
    const Symbol a = f.alpha_pow(i);
    Symbol acc = 0;
    for (int j = 0; j < k; ++j) acc = f.mul(acc, a) ^ word[static_cast<std::size_t>(j)];
    s[static_cast<std::size_t>(i)] = acc;
  }
  return s;
}

DecodeResult ReedSolomon::decode(std::span<const Symbol> received,
                                 std::span<const int> erasures) const {
  const GaloisField& f = spec_.field();
  const int k = spec_.length();
  const int e = spec_.parity_symbols();
  if (static_cast<int>(received.size()) != k) {
    throw std::invalid_argument("rs_decode expects " + std::to_string(k) + " symbols, got " +
                                std::to_string(received.size()));
  }

  std::vector<int> erased(erasures.begin(), erasures.end());
  std::sort(erased.begin(), erased.end());
  erased.erase(std::unique(erased.begin(), erased.end()), erased.end());
  for (int pos : erased) {
    if (pos < 0 || pos >= k) {
      throw std::invalid_argument("erasure position " + std::to_string(pos) + " out of range");
    }
  }

  DecodeResult out;
  out.codeword.assign(received.begin(), received.end());
  for (int pos : erased) out.codeword[static_cast<std::size_t>(pos)] = 0;
  const int f_count = static_cast<int>(erased.size());
  if (f_count > e) return out;

  std::vector<Symbol> synd = syndromes(out.codeword);
  const bool clean = std::all_of(synd.begin(), synd.end(), [](Symbol s) { return s == 0; });
  if (clean) {
    out.status = DecodeStatus::Ok;
    out.corrected = f_count;
    return out;
  }

  // Erasure locator Gamma(x) = prod (1 - X_i x), X_i = alpha^(K-1-pos).
  std::vector<Symbol> lambda{1};
  for (int pos : erased) {
    const Symbol x = f.alpha_pow(k - 1 - pos);
    lambda.push_back(0);
    for (std::size_t d = lambda.size() - 1; d > 0; --d) lambda[d] ^= f.mul(lambda[d - 1], x);
  }

  // Berlekamp-Massey continued from the erasure locator.
  std::vector<Symbol> prev = lambda;
  int length = f_count;
  int shift = 1;
  Symbol prev_disc = 1;
  for (int n = f_count; n < e; ++n) {
    Symbol disc = 0;
    for (std::size_t i = 0; i < lambda.size() && static_cast<int>(i) <= n; ++i) {
      disc ^= f.mul(lambda[i], synd[static_cast<std::size_t>(n) - i]);
    }
    if (disc == 0) {
      ++shift;
      continue;
    }
    const Symbol coef = f.div(disc, prev_disc);
    std::vector<Symbol> updated = lambda;
    if (updated.size() < prev.size() + shift) updated.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) updated[i + shift] ^= f.mul(coef, prev[i]);
    if (2 * length <= n + f_count) {
      prev = std::move(lambda);
      length = n + 1 + f_count - length;
      prev_disc = disc;
      shift = 1;
    } else {
      ++shift;
    }
    lambda = std::move(updated);
  }
  while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
  const int degree = static_cast<int>(lambda.size()) - 1;
  if (degree != length) return out;
  if (2 * (length - f_count) + f_count > e) return out;

  // Chien search over all K positions.
  std::vector<int> positions;
  positions.reserve(static_cast<std::size_t>(degree));
  for (int j = 0; j < k; ++j) {
    const Symbol xinv = f.alpha_pow(-(static_cast<long long>(k) - 1 - j));
    Symbol acc = 0;
    for (std::size_t d = lambda.size(); d-- > 0;) acc = f.mul(acc, xinv) ^ lambda[d];
    if (acc == 0) positions.push_back(j);
  }
  if (static_cast<int>(positions.size()) != degree) return out;

  // Omega(x) = S(x) Lambda(x) mod x^E.
  std::vector<Symbol> omega(static_cast<std::size_t>(e), 0);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] == 0) continue;
    for (std::size_t s = 0; s + i < omega.size(); ++s) omega[s + i] ^= f.mul(lambda[i], synd[s]);
  }

  std::vector<Symbol> fixed = out.codeword;
  int changed = 0;
  for (int pos : positions) {
    const Symbol x = f.alpha_pow(k - 1 - pos);
    const Symbol xinv = f.inv(x);
    Symbol num = 0;
    for (std::size_t d = omega.size(); d-- > 0;) num = f.mul(num, xinv) ^ omega[d];
    Symbol den = 0;  // Lambda'(xinv): odd-degree terms only in characteristic 2
    const Symbol xinv_sq = f.mul(xinv, xinv);
    Symbol pw = 1;
    for (std::size_t d = 1; d < lambda.size(); d += 2) {
      den ^= f.mul(lambda[d], pw);
      pw = f.mul(pw, xinv_sq);
    }
    if (den == 0) return out;
    const Symbol magnitude = f.mul(x, f.div(num, den));
    if (magnitude != 0) {
      fixed[static_cast<std::size_t>(pos)] ^= magnitude;
      if (!std::binary_search(erased.begin(), erased.end(), pos)) ++changed;
    }
  }

  synd = syndromes(fixed);
  if (!std::all_of(synd.begin(), synd.end(), [](Symbol s) { return s == 0; })) return out;
  out.codeword = std::move(fixed);
  out.status = DecodeStatus::Ok;
  out.corrected = changed + f_count;
  return out;
}

}  // namespace dnaskew
