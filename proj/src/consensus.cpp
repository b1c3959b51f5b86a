#include "dnaskew/consensus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dnaskew/parallel.hpp"

namespace dnaskew {

int edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<int> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

constexpr std::uint8_t kNoSymbol = 0xFF;

using Codes = std::vector<std::uint8_t>;

Codes encode_read(std::string_view read, const std::array<std::uint8_t, 256>& index, bool reverse) {
  Codes out(read.size());
  for (std::size_t i = 0; i < read.size(); ++i) {
    const char c = reverse ? read[read.size() - 1 - i] : read[i];
    out[i] = index[static_cast<unsigned char>(c)];
  }
  return out;
}

std::vector<Codes> encode_reads(std::span<const std::string> reads, const ReconstructionParams& params,
                                bool reverse) {
  if (reads.empty()) throw std::invalid_argument("one_way needs at least one read");
  if (params.length < 1) throw std::invalid_argument("reconstruction length must be >= 1");
  if (params.window < 1) throw std::invalid_argument("lookahead window must be >= 1");
  if (params.alphabet.empty() || params.alphabet.size() >= kNoSymbol) {
    throw std::invalid_argument("alphabet must hold 1..254 symbols");
  }
  std::array<std::uint8_t, 256> index;
  index.fill(kNoSymbol);
  for (std::size_t i = 0; i < params.alphabet.size(); ++i) {
    index[static_cast<unsigned char>(params.alphabet[i])] = static_cast<std::uint8_t>(i);
  }
  std::vector<Codes> out;
  out.reserve(reads.size());
  for (const std::string& r : reads) out.push_back(encode_read(r, index, reverse));
  return out;
}

/// Majority symbol, first in alphabet order on ties; kNoSymbol if no votes.
std::uint8_t majority(const int* counts, std::size_t n) {
  std::uint8_t best = kNoSymbol;
  int best_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] > best_count) {
      best = static_cast<std::uint8_t>(i);
      best_count = counts[i];
    }
  }
  return best;
}

std::string one_way_codes(const std::vector<Codes>& reads, const ReconstructionParams& params) {
  const std::string& alpha = params.alphabet;
  const std::size_t na = alpha.size();
  const std::size_t n = reads.size();
  const auto w = static_cast<std::size_t>(params.window);

  std::vector<std::size_t> ptr(n, 0);
  std::vector<char> agree(n, 0);
  std::vector<int> counts(na * (w + 1));
  // window[t] == kNoSymbol marks an undefined window position.
  std::vector<std::uint8_t> window(w);
  std::string out(static_cast<std::size_t>(params.length), alpha[0]);

  for (std::size_t i = 0; i < out.size(); ++i) {
    std::fill(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(na), 0);
    for (std::size_t r = 0; r < n; ++r) {
      if (ptr[r] < reads[r].size()) {
        const std::uint8_t v = reads[r][ptr[r]];
        if (v != kNoSymbol) ++counts[v];
      }
    }
    const std::uint8_t c = majority(counts.data(), na);
    if (c == kNoSymbol) continue;  // every read exhausted
    out[i] = alpha[c];

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      const Codes& s = reads[r];
      const std::size_t p = ptr[r];
      agree[r] = p < s.size() && s[p] == c;
      if (!agree[r]) continue;
      const std::size_t stop = std::min(s.size(), p + 1 + w);
      for (std::size_t q = p + 1; q < stop; ++q) {
        if (s[q] != kNoSymbol) ++counts[(q - p) * na + s[q]];
      }
    }
    for (std::size_t t = 0; t < w; ++t) window[t] = majority(counts.data() + (t + 1) * na, na);

    for (std::size_t r = 0; r < n; ++r) {
      const Codes& s = reads[r];
      const std::size_t p = ptr[r];
      if (p >= s.size()) continue;
      if (agree[r] || s.size() - p - 1 < w) {
        ptr[r] = p + 1;
        continue;
      }
      int sub = 0, del = 0, ins = 0;
      for (std::size_t t = 0; t < w; ++t) {
        if (window[t] != kNoSymbol) {
          sub += s[p + 1 + t] == window[t];
          del += s[p + t] == window[t];
        }
        const std::uint8_t expect = t == 0 ? c : window[t - 1];
        if (expect != kNoSymbol) ins += s[p + 1 + t] == expect;
      }
      std::size_t advance = 1;
      int best = sub;
      if (del > best) {
        best = del;
        advance = 0;
      }
      if (ins > best) advance = 2;
      ptr[r] = p + advance;
    }
  }
  return out;
}

}  // namespace

std::string one_way(std::span<const std::string> reads, const ReconstructionParams& params) {
  return one_way_codes(encode_reads(reads, params, false), params);
}

std::string two_way(std::span<const std::string> reads, const ReconstructionParams& params) {
  const std::string forward = one_way_codes(encode_reads(reads, params, false), params);
  std::string backward = one_way_codes(encode_reads(reads, params, true), params);
  std::reverse(backward.begin(), backward.end());
  const std::size_t half = (forward.size() + 1) / 2;
  return forward.substr(0, half) + backward.substr(half);
}

int total_edit_distance(std::string_view candidate, std::span<const std::string> reads) {
  int total = 0;
  for (const std::string& r : reads) total += edit_distance(candidate, r);
  return total;
}

std::string constrained_median_bruteforce(std::span<const std::string> reads, int length,
                                          std::string_view original, std::string_view alphabet,
                                          bool allow_large) {
  if (length < 1) throw std::invalid_argument("median length must be >= 1");
  if (alphabet.empty()) throw std::invalid_argument("alphabet must not be empty");
  if (static_cast<int>(original.size()) != length) {
    throw std::invalid_argument("original must have the target length");
  }
  if (!allow_large) {
    const int cap = alphabet.size() <= 2 ? 16 : (alphabet.size() <= 4 ? 10 : 8);
    if (length > cap) {
      throw std::invalid_argument("length " + std::to_string(length) + " exceeds the enumeration cap of " +
                                  std::to_string(cap) + " for this alphabet; pass allow_large to override");
    }
  }

  const std::size_t n = reads.size();
  const auto L = static_cast<std::size_t>(length);
  // rows[d][r] = DP row of candidate prefix length d against read r.
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) offset[r + 1] = offset[r] + reads[r].size() + 1;
  const std::size_t stride = offset[n];
  std::vector<int> rows((L + 1) * stride);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j <= reads[r].size(); ++j) rows[offset[r] + j] = static_cast<int>(j);
  }

  std::string cand(L, alphabet[0]);
  std::string best;
  int best_cost = std::numeric_limits<int>::max();
  long best_score = -1;
  std::vector<std::size_t> choice(L + 1, 0);

  auto weight = [&](std::size_t i) { return static_cast<long>(std::min(i, L - 1 - i)); };

  // Iterative DFS in lexicographic order.
  std::size_t depth = 0;
  choice[0] = 0;
  for (;;) {
    if (choice[depth] >= alphabet.size()) {
      if (depth == 0) break;
      --depth;
      ++choice[depth];
      continue;
    }
    const char ch = alphabet[choice[depth]];
    cand[depth] = ch;
    const int* prev = &rows[depth * stride];
    int* cur = &rows[(depth + 1) * stride];
    const int d1 = static_cast<int>(depth + 1);
    const long remaining = static_cast<long>(L - depth - 1);
    long bound = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& s = reads[r];
      const int* pr = prev + offset[r];
      int* cr = cur + offset[r];
      cr[0] = d1;
      long row_min = static_cast<long>(cr[0]) + std::labs(remaining - static_cast<long>(s.size()));
      for (std::size_t j = 1; j <= s.size(); ++j) {
        cr[j] = std::min({pr[j] + 1, cr[j - 1] + 1, pr[j - 1] + (s[j - 1] == ch ? 0 : 1)});
        const long lb = cr[j] + std::labs(remaining - static_cast<long>(s.size() - j));
        row_min = std::min(row_min, lb);
      }
      bound += row_min;
    }
    if (bound > best_cost) {
      ++choice[depth];
      continue;
    }
    if (depth + 1 == L) {
      int cost = 0;
      for (std::size_t r = 0; r < n; ++r) cost += cur[offset[r] + reads[r].size()];
      long score = 0;
      for (std::size_t i = 0; i < L; ++i) {
        if (cand[i] == original[i]) score += weight(i);
      }
      if (cost < best_cost || (cost == best_cost && score > best_score)) {
        best_cost = cost;
        best_score = score;
        best = cand;
      }
      ++choice[depth];
      continue;
    }
    ++depth;
    choice[depth] = 0;
  }
  return best;
}

std::string to_string(Reconstructor r) {
  switch (r) {
    case Reconstructor::OneWay: return "one_way";
    case Reconstructor::TwoWay: return "two_way";
    case Reconstructor::Oracle: return "oracle";
  }
  return "unknown";
}

Reconstructor parse_reconstructor(const std::string& name) {
  if (name == "one_way" || name == "oneway") return Reconstructor::OneWay;
  if (name == "two_way" || name == "twoway") return Reconstructor::TwoWay;
  if (name == "oracle" || name == "bruteforce") return Reconstructor::Oracle;
  throw std::invalid_argument("unknown reconstructor '" + name + "' (one_way|two_way|oracle)");
}

SkewProfile skew_profile(const SkewConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("skew profile needs at least one trial");
  if (config.coverage < 1) throw std::invalid_argument("skew profile needs coverage >= 1");
  ChannelConfig channel;
  channel.p = config.p;
  channel.breakdown = config.breakdown;
  channel.seed = config.seed;
  channel.alphabet = config.alphabet;
  channel.validate();
  ReconstructionParams params;
  params.length = config.length;
  params.window = config.window;
  params.alphabet = config.alphabet;

  const auto L = static_cast<std::size_t>(config.length);
  std::vector<std::uint8_t> indicators(config.trials * L, 0);
  const auto na = static_cast<std::uint32_t>(config.alphabet.size());

  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    Rng rng = stream_rng(config.seed, {0x5E7u, t});
    std::string strand(L, ' ');
    for (char& c : strand) c = config.alphabet[uniform_below(rng, na)];
    std::vector<std::string> reads;
    reads.reserve(static_cast<std::size_t>(config.coverage));
    for (int i = 0; i < config.coverage; ++i) reads.push_back(corrupt_read(strand, channel, rng));
    std::string guess;
    switch (config.algorithm) {
      case Reconstructor::OneWay: guess = one_way(reads, params); break;
      case Reconstructor::TwoWay: guess = two_way(reads, params); break;
      case Reconstructor::Oracle:
        guess = constrained_median_bruteforce(reads, config.length, strand, config.alphabet,
                                              config.allow_large);
        break;
    }
    std::uint8_t* row = &indicators[t * L];
    for (std::size_t i = 0; i < L; ++i) row[i] = guess[i] != strand[i];
  });

  SkewProfile out;
  out.config = config;
  out.mismatches.assign(L, 0);
  for (std::size_t t = 0; t < config.trials; ++t) {
    for (std::size_t i = 0; i < L; ++i) out.mismatches[i] += indicators[t * L + i];
  }
  out.error.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    out.error[i] = static_cast<double>(out.mismatches[i]) / static_cast<double>(config.trials);
  }
  if (config.keep_trials) out.per_trial = std::move(indicators);
  return out;
}

void write_skew_profile_csv(std::ostream& os, const SkewProfile& profile) {
  const SkewConfig& c = profile.config;
  os << "position,error_probability,trials,p,N,L,algorithm\n";
  for (std::size_t i = 0; i < profile.error.size(); ++i) {
    os << i << ',' << std::setprecision(10) << profile.error[i] << ',' << c.trials << ','
       << c.p << ',' << c.coverage << ',' << c.length << ',' << to_string(c.algorithm) << '\n';
  }
}

}  // namespace dnaskew
