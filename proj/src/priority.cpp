#include "dnaskew/priority.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "dnaskew/codec.hpp"
#include "dnaskew/parallel.hpp"

namespace dnaskew {

CapacityError::CapacityError(std::size_t requested_bits, std::size_t capacity_bits)
    : std::runtime_error("payload of " + std::to_string(requested_bits) +
                         " bits exceeds capacity of " + std::to_string(capacity_bits) + " bits"),
      requested_(requested_bits),
      capacity_(capacity_bits) {}

BitRanking::BitRanking(std::vector<std::size_t> class_capacities, std::vector<std::size_t> file_bits,
                       std::vector<RankSegment> segments)
    : capacities_(std::move(class_capacities)),
      file_bits_(std::move(file_bits)),
      segments_(std::move(segments)) {
  total_ = std::accumulate(capacities_.begin(), capacities_.end(), std::size_t{0});
}

ClassSlot BitRanking::assignment(std::size_t payload_bit) const {
  if (payload_bit >= total_) throw std::out_of_range("payload bit outside ranking");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), payload_bit,
                             [](std::size_t bit, const RankSegment& s) { return bit < s.payload_offset; });
  --it;
  return ClassSlot{it->class_rank, it->class_offset + (payload_bit - it->payload_offset)};
}

std::size_t BitRanking::share(std::size_t file, int class_rank) const {
  std::size_t start = 0;
  for (std::size_t f = 0; f < file; ++f) start += file_bits_[f];
  const std::size_t end = start + file_bits_.at(file);
  std::size_t total = 0;
  for (const RankSegment& s : segments_) {
    if (s.class_rank == class_rank && s.payload_offset >= start && s.payload_offset < end) {
      total += s.count;
    }
  }
  return total;
}

namespace {

using u128 = unsigned __int128;

/// Integer matrix of per-(file, class) shares whose entries are floor or
/// ceil of size_f * cap_k / total and whose row and column sums are exact.
/// Unit increments go to the largest remainders first; an augmenting-path
/// pass fixes any class the greedy pass could not complete.
std::vector<std::vector<std::size_t>> proportional_shares(const std::vector<std::size_t>& sizes,
                                                          const std::vector<std::size_t>& caps) {
  const std::size_t nf = sizes.size();
  const std::size_t nc = caps.size();
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> share(nf, std::vector<std::size_t>(nc, 0));
  if (total == 0) return share;

  std::vector<std::vector<std::size_t>> rem(nf, std::vector<std::size_t>(nc, 0));
  std::vector<long long> supply(nf, 0);
  std::vector<long long> demand(nc, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    long long used = 0;
    for (std::size_t k = 0; k < nc; ++k) {
      const u128 prod = static_cast<u128>(sizes[f]) * caps[k];
      share[f][k] = static_cast<std::size_t>(prod / total);
      rem[f][k] = static_cast<std::size_t>(prod % total);
      used += static_cast<long long>(share[f][k]);
    }
    supply[f] = static_cast<long long>(sizes[f]) - used;
  }
  for (std::size_t k = 0; k < nc; ++k) {
    long long used = 0;
    for (std::size_t f = 0; f < nf; ++f) used += static_cast<long long>(share[f][k]);
    demand[k] = static_cast<long long>(caps[k]) - used;
  }

  std::vector<std::vector<char>> bumped(nf, std::vector<char>(nc, 0));
  for (std::size_t k = 0; k < nc; ++k) {
    std::vector<std::size_t> order(nf);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a][k] > rem[b][k]; });
    for (std::size_t f : order) {
      if (demand[k] == 0) break;
      if (rem[f][k] == 0 || supply[f] == 0) continue;
      bumped[f][k] = 1;
      --supply[f];
      --demand[k];
    }
  }

  // Augment: class k (short) <- file f (bump allowed) ... -> file with spare supply.
  for (std::size_t k0 = 0; k0 < nc; ++k0) {
    while (demand[k0] > 0) {
      // BFS over classes; from class k we can take a bump from any file f not yet
      // bumped in k, then that file may give up a bump it holds in another class.
      std::vector<long long> class_parent(nc, -1);   // file index reached from
      std::vector<long long> file_parent(nf, -1);    // class index reached from
      std::vector<char> class_seen(nc, 0), file_seen(nf, 0);
      std::deque<std::size_t> queue{k0};
      class_seen[k0] = 1;
      long long found_file = -1;
      while (!queue.empty() && found_file < 0) {
        const std::size_t k = queue.front();
        queue.pop_front();
        for (std::size_t f = 0; f < nf; ++f) {
          if (file_seen[f] || rem[f][k] == 0 || bumped[f][k]) continue;
          file_seen[f] = 1;
          file_parent[f] = static_cast<long long>(k);
          if (supply[f] > 0) {
            found_file = static_cast<long long>(f);
            break;
          }
          for (std::size_t k2 = 0; k2 < nc; ++k2) {
            if (!class_seen[k2] && bumped[f][k2]) {
              class_seen[k2] = 1;
              class_parent[k2] = static_cast<long long>(f);
              queue.push_back(k2);
            }
          }
        }
      }
      if (found_file < 0) throw std::logic_error("proportional rounding found no augmenting path");
      --supply[static_cast<std::size_t>(found_file)];
      --demand[k0];
      std::size_t f = static_cast<std::size_t>(found_file);
      for (;;) {
        const std::size_t k = static_cast<std::size_t>(file_parent[f]);
        bumped[f][k] = 1;
        if (k == k0) break;
        const std::size_t prev_f = static_cast<std::size_t>(class_parent[k]);
        bumped[prev_f][k] = 0;
        f = prev_f;
      }
    }
  }

  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t k = 0; k < nc; ++k) share[f][k] += bumped[f][k] ? 1 : 0;
  }
  return share;
}

}  // namespace

BitRanking rank_bits_positional(std::span<const std::size_t> file_bits,
                                std::span<const std::size_t> class_capacities,
                                bool first_is_directory) {
  const std::size_t nc = class_capacities.size();
  if (nc == 0) throw std::invalid_argument("ranking needs at least one class");
  const std::size_t capacity =
      std::accumulate(class_capacities.begin(), class_capacities.end(), std::size_t{0});
  const std::size_t requested = std::accumulate(file_bits.begin(), file_bits.end(), std::size_t{0});
  if (requested > capacity) throw CapacityError(requested, capacity);
  if (first_is_directory && file_bits.empty()) {
    throw std::invalid_argument("directory flag set without a directory file");
  }

  const std::size_t nf = file_bits.size();
  std::vector<std::size_t> remaining(class_capacities.begin(), class_capacities.end());
  // shares[f][k]; the padding pseudo-file sits at index nf.
  std::vector<std::vector<std::size_t>> shares(nf + 1, std::vector<std::size_t>(nc, 0));

  std::size_t first_prop = 0;
  if (first_is_directory) {
    std::size_t left = file_bits[0];
    for (std::size_t k = 0; k < nc && left > 0; ++k) {
      const std::size_t take = std::min(left, remaining[k]);
      shares[0][k] = take;
      remaining[k] -= take;
      left -= take;
    }
    first_prop = 1;
  }

  std::vector<std::size_t> prop_sizes(file_bits.begin() + static_cast<std::ptrdiff_t>(first_prop),
                                      file_bits.end());
  prop_sizes.push_back(capacity - requested);
  const auto prop = proportional_shares(prop_sizes, remaining);
  for (std::size_t i = 0; i < prop.size(); ++i) shares[first_prop + i] = prop[i];

  // Lay out: class slots are filled directory first, then files in order, padding last.
  std::vector<std::size_t> class_cursor(nc, 0);
  std::vector<RankSegment> segments;
  std::size_t payload_offset = 0;
  for (std::size_t f = 0; f <= nf; ++f) {
    for (std::size_t k = 0; k < nc; ++k) {
      const std::size_t n = shares[f][k];
      if (n == 0) continue;
      segments.push_back(RankSegment{payload_offset, n, static_cast<int>(k), class_cursor[k]});
      payload_offset += n;
    }
    for (std::size_t k = 0; k < nc; ++k) class_cursor[k] += shares[f][k];
  }
  return BitRanking(std::vector<std::size_t>(class_capacities.begin(), class_capacities.end()),
                    std::vector<std::size_t>(file_bits.begin(), file_bits.end()), std::move(segments));
}

std::vector<std::size_t> rank_bits_oracle(
    std::span<const std::uint8_t> file,
    const std::function<FlipLoss(std::span<const std::uint8_t>)>& quality_fn, int threads) {
  const std::size_t nbits = file.size() * 8;
  std::vector<FlipLoss> losses(nbits);
  const int workers = resolve_threads(threads);
  // One scratch copy per chunk keeps quality_fn calls independent.
  const std::size_t chunk = 256;
  const std::size_t chunks = (nbits + chunk - 1) / chunk;
  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<std::uint8_t> scratch(file.begin(), file.end());
    const std::size_t end = std::min(nbits, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) {
      scratch[i >> 3] ^= static_cast<std::uint8_t>(0x80u >> (i & 7));
      losses[i] = quality_fn(scratch);
      scratch[i >> 3] ^= static_cast<std::uint8_t>(0x80u >> (i & 7));
    }
  });
  std::vector<std::size_t> order(nbits);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const FlipLoss& la = losses[a];
    const FlipLoss& lb = losses[b];
    if (la.undecodable != lb.undecodable) return la.undecodable;
    if (la.undecodable) return false;
    return la.loss_db > lb.loss_db;
  });
  return order;
}

std::vector<std::uint8_t> pack_directory(std::span<const DirectoryEntry> entries) {
  if (entries.size() > 0xFFFF) throw std::invalid_argument("directory holds at most 65535 entries");
  std::vector<std::uint8_t> out;
  auto put = [&](std::uint64_t v, int bytes) {
    for (int b = bytes - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  };
  put(entries.size(), 2);
  for (const DirectoryEntry& e : entries) {
    if (e.name.size() > 0xFFFF) throw std::invalid_argument("file name longer than 65535 bytes");
    put(e.name.size(), 2);
    out.insert(out.end(), e.name.begin(), e.name.end());
    put(e.size, 8);
  }
  return out;
}

std::vector<DirectoryEntry> unpack_directory_prefix(std::span<const std::uint8_t> bytes,
                                                    std::size_t* consumed) {
  std::size_t pos = 0;
  auto get = [&](int width) {
    if (pos + static_cast<std::size_t>(width) > bytes.size()) {
      throw ParseError("truncated directory", pos);
    }
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v = (v << 8) | bytes[pos++];
    return v;
  };
  const std::size_t count = static_cast<std::size_t>(get(2));
  std::vector<DirectoryEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len = static_cast<std::size_t>(get(2));
    if (pos + len > bytes.size()) throw ParseError("truncated directory name", pos);
    DirectoryEntry e;
    e.name.assign(reinterpret_cast<const char*>(bytes.data() + pos), len);
    pos += len;
    e.size = get(8);
    out.push_back(std::move(e));
  }
  if (consumed != nullptr) *consumed = pos;
  return out;
}

std::vector<DirectoryEntry> unpack_directory(std::span<const std::uint8_t> bytes) {
  std::size_t consumed = 0;
  auto out = unpack_directory_prefix(bytes, &consumed);
  if (consumed != bytes.size()) throw ParseError("trailing bytes after directory", consumed);
  return out;
}

}  // namespace dnaskew
