#include "dnaskew/channel.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "dnaskew/codec.hpp"
#include "dnaskew/parallel.hpp"

namespace dnaskew {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kCoverageTag = 0xC0FE;

}  // namespace

Rng stream_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ull));
  return Rng(h);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint32_t uniform_below(Rng& rng, std::uint32_t n) {
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

void ChannelConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("error rate p must lie in [0,1]");
  const ErrorBreakdown& b = breakdown;
  if (b.substitution < 0 || b.deletion < 0 || b.insertion < 0) {
    throw std::invalid_argument("error breakdown fractions must be non-negative");
  }
  if (std::abs(b.substitution + b.deletion + b.insertion - 1.0) > 1e-9) {
    throw std::invalid_argument("error breakdown fractions must sum to 1");
  }
  if (alphabet.size() < 2) throw std::invalid_argument("alphabet needs at least two symbols");
}

void CoverageModel::validate() const {
  if (kind == Kind::Fixed) {
    if (mean < 0 || mean != std::floor(mean)) {
      throw std::invalid_argument("fixed coverage must be a non-negative integer");
    }
  } else if (!(mean > 0) || !(shape > 0)) {
    throw std::invalid_argument("gamma coverage needs mean > 0 and shape > 0");
  }
}

int CoverageModel::draw(Rng& rng) const {
  if (kind == Kind::Fixed) return static_cast<int>(mean);
  std::gamma_distribution<double> dist(shape, mean / shape);
  const double v = std::round(dist(rng));
  return v < 0 ? 0 : static_cast<int>(v);
}

std::string corrupt_read(std::string_view strand, const ChannelConfig& cfg, Rng& rng) {
  const double p_del = cfg.p * cfg.breakdown.deletion;
  const double p_ins = p_del + cfg.p * cfg.breakdown.insertion;
  const double p_any = p_ins + cfg.p * cfg.breakdown.substitution;
  const std::string& alpha = cfg.alphabet;
  const auto na = static_cast<std::uint32_t>(alpha.size());
  std::string out;
  out.reserve(strand.size() + strand.size() / 8 + 4);
  for (char s : strand) {
    const double u = uniform01(rng);
    if (u >= p_any) {
      out.push_back(s);
    } else if (u < p_del) {
      // deleted
    } else if (u < p_ins) {
      out.push_back(alpha[uniform_below(rng, na)]);
      out.push_back(s);
    } else {
      const std::size_t own = alpha.find(s);
      if (own == std::string::npos) {
        out.push_back(alpha[uniform_below(rng, na)]);
      } else {
        std::uint32_t k = uniform_below(rng, na - 1);
        if (k >= own) ++k;
        out.push_back(alpha[k]);
      }
    }
  }
  return out;
}

std::vector<int> sample_coverage(const CoverageModel& model, int count, Rng& rng) {
  model.validate();
  std::vector<int> out(static_cast<std::size_t>(std::max(count, 0)));
  for (int& v : out) v = model.draw(rng);
  return out;
}

std::vector<Cluster> make_clusters(std::span<const std::string> strands, const ChannelConfig& cfg,
                                   const CoverageModel& model, std::uint64_t trial, int threads) {
  cfg.validate();
  model.validate();
  std::vector<Cluster> out(strands.size());
  parallel_for(strands.size(), threads, [&](std::size_t k) {
    Rng count_rng = stream_rng(cfg.seed, {trial, k, kCoverageTag});
    const int n = model.draw(count_rng);
    Rng rng = stream_rng(cfg.seed, {trial, k});
    Cluster& c = out[k];
    c.column = static_cast<int>(k);
    c.reads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c.reads.push_back(corrupt_read(strands[k], cfg, rng));
  });
  return out;
}

void write_reads(std::ostream& os, std::span<const Cluster> clusters) {
  for (const Cluster& c : clusters) {
    for (const std::string& r : c.reads) os << c.column << '\t' << r << '\n';
  }
}

std::vector<Cluster> read_reads(std::istream& is) {
  std::map<int, Cluster> by_id;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(is, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("reads line without TAB", line_start);
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(line.substr(0, tab), &used);
      if (used != tab || id < 0) throw std::invalid_argument("id");
    } catch (const std::exception&) {
      throw ParseError("bad cluster id", line_start);
    }
    Cluster& c = by_id[id];
    c.column = id;
    c.reads.push_back(line.substr(tab + 1));
  }
  std::vector<Cluster> out;
  out.reserve(by_id.size());
  for (auto& [id, c] : by_id) out.push_back(std::move(c));
  return out;
}

}  // namespace dnaskew
