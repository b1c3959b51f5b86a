#include "dnaskew/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dnaskew/consensus.hpp"
#include "dnaskew/parallel.hpp"

namespace dnaskew {

namespace {

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string loss_cell(const QualityResult& q) { return q.undecodable ? "U" : fmt(q.loss_db); }

}  // namespace

std::string LayoutChoice::label() const {
  return oracle_ranking ? "dnamapper_oracle" : to_string(strategy);
}

LayoutChoice LayoutChoice::parse(const std::string& name) {
  if (name == "dnamapper_oracle") return {Strategy::DnaMapper, true};
  return {parse_strategy(name), false};
}

Geometry ExperimentConfig::geometry(Strategy s) const {
  Geometry g;
  g.m = m;
  g.redundancy = redundancy;
  g.rows = rows;
  g.strategy = s;
  if (s == Strategy::Gini) g.reserved_rows = reserved_rows;
  return g;
}

std::vector<LayoutChoice> ExperimentConfig::layout_choices() const {
  std::vector<LayoutChoice> out;
  for (const auto& l : layouts) out.push_back(LayoutChoice::parse(l));
  return out;
}

CoverageModel ExperimentConfig::coverage(double n) const {
  if (coverage_model == "gamma") return CoverageModel::gamma(n, gamma_shape);
  return CoverageModel::fixed(static_cast<int>(n));
}

ChannelConfig ExperimentConfig::channel(double p) const {
  ChannelConfig ch;
  ch.p = p;
  ch.breakdown = breakdown;
  ch.seed = seed;
  return ch;
}

void ExperimentConfig::validate() const {
  geometry(Strategy::Baseline).validate();
  if (!reserved_rows.empty()) geometry(Strategy::Gini).validate();
  if (layouts.empty()) throw std::invalid_argument("no layouts selected");
  layout_choices();
  if (error_rates.empty()) throw std::invalid_argument("no error rates selected");
  for (double p : error_rates) channel(p).validate();
  if (coverage_model != "fixed" && coverage_model != "gamma") {
    throw std::invalid_argument("coverage model must be 'fixed' or 'gamma'");
  }
  if (coverages.empty()) throw std::invalid_argument("no coverages selected");
  for (int n : coverages) {
    if (n < 0) throw std::invalid_argument("coverage must be non-negative");
    if (coverage_model == "gamma" && n == 0) throw std::invalid_argument("gamma coverage needs a positive mean");
  }
  if (gamma_shape <= 0) throw std::invalid_argument("gamma shape must be positive");
  if (min_coverage_start < 1 || max_coverage < min_coverage_start) {
    throw std::invalid_argument("coverage scan bounds must satisfy 1 <= start <= max");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int k = (1 << m) - 1;
  if (drop_last_columns < 0 || drop_last_columns > k) {
    throw std::invalid_argument("drop_last_columns must be in [0, K]");
  }
  if (profile_stride < 1) throw std::invalid_argument("profile stride must be >= 1");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["m"] = c.m;
  j["redundancy"] = c.redundancy;
  j["rows"] = c.rows;
  j["reserved_rows"] = c.reserved_rows;
  j["layouts"] = c.layouts;
  j["error_rates"] = c.error_rates;
  j["breakdown"] = {{"substitution", c.breakdown.substitution},
                    {"deletion", c.breakdown.deletion},
                    {"insertion", c.breakdown.insertion}};
  j["coverage_model"] = c.coverage_model;
  j["gamma_shape"] = c.gamma_shape;
  j["coverages"] = c.coverages;
  j["min_coverage_start"] = c.min_coverage_start;
  j["max_coverage"] = c.max_coverage;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["drop_last_columns"] = c.drop_last_columns;
  j["ref_db"] = c.ref_db;
  j["profile_stride"] = c.profile_stride;
  j["timing"] = c.timing;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known = {
      "m", "redundancy", "rows", "reserved_rows", "layouts", "error_rates", "breakdown",
      "coverage_model", "gamma_shape", "coverages", "min_coverage_start", "max_coverage",
      "trials", "seed", "drop_last_columns", "ref_db", "profile_stride", "timing", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  try {
    get("m", c.m);
    get("redundancy", c.redundancy);
    get("rows", c.rows);
    get("reserved_rows", c.reserved_rows);
    get("layouts", c.layouts);
    get("error_rates", c.error_rates);
    if (j.contains("breakdown")) {
      const auto& b = j.at("breakdown");
      if (b.contains("substitution")) b.at("substitution").get_to(c.breakdown.substitution);
      if (b.contains("deletion")) b.at("deletion").get_to(c.breakdown.deletion);
      if (b.contains("insertion")) b.at("insertion").get_to(c.breakdown.insertion);
    }
    get("coverage_model", c.coverage_model);
    get("gamma_shape", c.gamma_shape);
    get("coverages", c.coverages);
    get("min_coverage_start", c.min_coverage_start);
    get("max_coverage", c.max_coverage);
    get("trials", c.trials);
    get("seed", c.seed);
    get("drop_last_columns", c.drop_last_columns);
    get("ref_db", c.ref_db);
    get("profile_stride", c.profile_stride);
    get("timing", c.timing);
    get("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv_header(std::ostream& os, const std::string& kind, const ExperimentConfig& c) {
  os << "# dnaskew " << kind << " schema=" << kCsvSchemaVersion << '\n';
  os << "# config_hash=" << config_hash(c) << " seed=" << c.seed << '\n';
  os << "# config=" << to_json(c).dump() << '\n';
}

std::vector<InputFile> filler_files(const Geometry& geometry, std::uint64_t seed, std::uint64_t variant) {
  InputFile f;
  f.name = "filler.bin";
  const std::vector<DirectoryEntry> dir = {{f.name, 0}};
  const std::size_t overhead = pack_directory(dir).size();
  const std::size_t capacity = geometry.capacity_bytes();
  if (capacity <= overhead) throw std::invalid_argument("unit too small for a filler file");
  f.bytes.resize(capacity - overhead);
  Rng rng = stream_rng(seed, {0xF111E2ull, variant});
  for (auto& b : f.bytes) b = static_cast<std::uint8_t>(rng() >> 56);
  return {f};
}

EncodingMatrix simulate_trial(const EncodedUnit& unit, const std::vector<std::string>& strands,
                              const ChannelConfig& channel, const CoverageModel& coverage,
                              std::uint64_t trial, int drop_last_columns) {
  std::vector<Cluster> clusters = make_clusters(strands, channel, coverage, trial, 1);
  const int k = static_cast<int>(clusters.size());
  for (int i = 0; i < drop_last_columns && i < k; ++i) clusters[static_cast<std::size_t>(k - 1 - i)].reads.clear();
  return reconstruct_matrix(clusters, unit.layout, unit.geometry.strand_layout(false), 1);
}

// --- skew ----------------------------------------------------------------

std::uint64_t SkewResult::total() const {
  std::uint64_t t = 0;
  for (auto v : baseline) t += v;
  return t;
}

SkewResult run_skew(const ExperimentConfig& c) {
  c.validate();
  if (c.error_rates.size() != 1 || c.coverages.size() != 1) {
    throw std::invalid_argument("skew takes exactly one error rate and one coverage");
  }
  const Geometry gb = c.geometry(Strategy::Baseline);
  const MatrixLayout base = MatrixLayout::baseline(gb.code_spec(), gb.rows);
  const MatrixLayout gini = MatrixLayout::gini(gb.code_spec(), gb.rows, c.reserved_rows);
  const int rows = base.rows();
  const int cols = base.cols();

  std::vector<int> own_b(static_cast<std::size_t>(rows) * cols);
  std::vector<int> own_g(own_b.size());
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      own_b[static_cast<std::size_t>(r) * cols + col] = base.cell_owner(r, col).codeword;
      own_g[static_cast<std::size_t>(r) * cols + col] = gini.cell_owner(r, col).codeword;
    }
  }

  const ChannelConfig ch = c.channel(c.error_rates[0]);
  const CoverageModel cov = c.coverage(c.coverages[0]);
  const auto trials = static_cast<std::size_t>(c.trials);
  std::vector<std::vector<std::uint32_t>> per_b(trials), per_g(trials);
  parallel_for(trials, c.threads, [&](std::size_t t) {
    // Fresh content per trial, otherwise a few hard strands pin errors to fixed cells.
    const EncodedUnit unit = encode_files(filler_files(gb, c.seed, t + 1), gb);
    const auto strands = channel_strands(unit);
    const EncodingMatrix rx = simulate_trial(unit, strands, ch, cov, t, c.drop_last_columns);
    std::vector<std::uint32_t> b(static_cast<std::size_t>(rows), 0), g(static_cast<std::size_t>(rows), 0);
    for (int r = 0; r < rows; ++r) {
      for (int col = 0; col < cols; ++col) {
        if (rx.erased_columns[static_cast<std::size_t>(col)] || rx.at(r, col) != unit.matrix.at(r, col)) {
          const std::size_t cell = static_cast<std::size_t>(r) * cols + col;
          ++b[static_cast<std::size_t>(own_b[cell])];
          ++g[static_cast<std::size_t>(own_g[cell])];
        }
      }
    }
    per_b[t] = std::move(b);
    per_g[t] = std::move(g);
  });

  SkewResult out;
  out.p = c.error_rates[0];
  out.coverage = c.coverages[0];
  out.baseline.assign(static_cast<std::size_t>(rows), 0);
  out.gini.assign(static_cast<std::size_t>(rows), 0);
  for (std::size_t t = 0; t < trials; ++t) {
    for (int r = 0; r < rows; ++r) {
      out.baseline[static_cast<std::size_t>(r)] += per_b[t][static_cast<std::size_t>(r)];
      out.gini[static_cast<std::size_t>(r)] += per_g[t][static_cast<std::size_t>(r)];
    }
  }
  return out;
}

void write_skew_csv(std::ostream& os, const ExperimentConfig& c, const SkewResult& r) {
  write_csv_header(os, "skew", c);
  os << "# p=" << fmt_g(r.p) << " coverage=" << r.coverage << " trials=" << c.trials << '\n';
  os << "codeword_id,layout,symbol_errors\n";
  for (std::size_t i = 0; i < r.baseline.size(); ++i) os << i << ",baseline," << r.baseline[i] << '\n';
  for (std::size_t i = 0; i < r.gini.size(); ++i) os << i << ",gini," << r.gini[i] << '\n';
}

// --- minimum coverage ---------------------------------------------------------

namespace {

bool trial_clean(const EncodedUnit& unit, const EncodingMatrix& rx) {
  const RecoveredPayload rec = recover_unit(rx, unit.geometry, unit.layout, 1);
  if (!rec.report.success()) return false;
  return std::equal(unit.payload.begin(), unit.payload.end(), rec.bytes.begin());
}

}  // namespace

std::vector<MinCoverageRow> run_min_coverage(const ExperimentConfig& c) {
  c.validate();
  std::vector<MinCoverageRow> out;
  const auto choices = c.layout_choices();
  std::vector<EncodedUnit> units;
  std::vector<std::vector<std::string>> strands;
  for (const LayoutChoice& lc : choices) {
    if (lc.oracle_ranking) throw std::invalid_argument("mincov does not use bit rankings; use 'dnamapper'");
    const Geometry g = c.geometry(lc.strategy);
    units.push_back(encode_files(filler_files(g, c.seed), g));
    strands.push_back(channel_strands(units.back()));
  }
  const auto trials = static_cast<std::size_t>(c.trials);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, resolve_threads(c.threads))) * 2;
  for (double p : c.error_rates) {
    const ChannelConfig ch = c.channel(p);
    for (std::size_t li = 0; li < choices.size(); ++li) {
      MinCoverageRow row{p, choices[li].label(), std::nullopt};
      for (int n = c.min_coverage_start; n <= c.max_coverage && !row.min_coverage; ++n) {
        const CoverageModel cov = c.coverage(n);
        std::atomic<bool> failed{false};
        for (std::size_t start = 0; start < trials && !failed; start += batch) {
          const std::size_t count = std::min(batch, trials - start);
          parallel_for(count, c.threads, [&](std::size_t i) {
            if (failed) return;
            const auto rx = simulate_trial(units[li], strands[li], ch, cov, start + i, c.drop_last_columns);
            if (!trial_clean(units[li], rx)) failed = true;
          });
        }
        if (!failed) row.min_coverage = n;
      }
      out.push_back(row);
    }
  }
  return out;
}

void write_min_coverage_csv(std::ostream& os, const ExperimentConfig& c,
                            const std::vector<MinCoverageRow>& rows) {
  write_csv_header(os, "mincov", c);
  os << "p,layout,min_coverage\n";
  for (const auto& r : rows) {
    os << fmt_g(r.p) << ',' << r.layout << ',';
    if (r.min_coverage) {
      os << *r.min_coverage;
    } else {
      os << '>' << c.max_coverage;
    }
    os << '\n';
  }
}

// --- quality sweep ------------------------------------------------------------

int RunRecord::undecodable_files() const {
  int n = 0;
  for (const auto& q : losses) n += q.undecodable;
  return n;
}

double RunRecord::mean_loss() const {
  double s = 0;
  int n = 0;
  for (const auto& q : losses) {
    if (!q.undecodable) {
      s += q.loss_db;
      ++n;
    }
  }
  return n ? s / n : 0.0;
}

std::vector<SweepPoint> SweepResult::summary() const {
  std::vector<SweepPoint> out;
  std::size_t i = 0;
  while (i < records.size()) {
    SweepPoint pt;
    pt.layout = records[i].layout;
    pt.p = records[i].p;
    pt.coverage = records[i].coverage;
    double loss_sum = 0;
    std::size_t decodable = 0, pairs = 0, failures = 0;
    std::size_t j = i;
    for (; j < records.size() && records[j].layout == pt.layout && records[j].p == pt.p &&
           records[j].coverage == pt.coverage;
         ++j) {
      const RunRecord& r = records[j];
      ++pt.trials;
      failures += !r.decode_success;
      for (const auto& q : r.losses) {
        ++pairs;
        if (!q.undecodable) {
          loss_sum += q.loss_db;
          ++decodable;
        }
      }
    }
    pt.mean_loss_db = decodable ? loss_sum / static_cast<double>(decodable) : 0.0;
    pt.undecodable_rate = pairs ? static_cast<double>(pairs - decodable) / static_cast<double>(pairs) : 0.0;
    pt.failure_rate = static_cast<double>(failures) / pt.trials;
    out.push_back(pt);
    i = j;
  }
  return out;
}

std::vector<std::size_t> oracle_bit_order(const std::vector<std::uint8_t>& jpeg, double ref_db, int threads) {
  const QualityEvaluator ev(jpeg, ref_db);
  return rank_bits_oracle(
      jpeg,
      [&ev](std::span<const std::uint8_t> bytes) {
        const QualityResult q = ev(bytes);
        return FlipLoss{q.undecodable, q.loss_db};
      },
      threads);
}

SweepResult run_quality_sweep(const ExperimentConfig& c, const std::vector<InputFile>& files) {
  c.validate();
  if (files.empty()) throw std::invalid_argument("quality sweep needs at least one file");
  const auto choices = c.layout_choices();

  std::vector<std::optional<QualityEvaluator>> evaluators;
  for (const InputFile& f : files) {
    if (decode_jpeg(f.bytes)) {
      evaluators.emplace_back(QualityEvaluator(f.bytes, c.ref_db));
    } else {
      evaluators.emplace_back(std::nullopt);
    }
  }

  std::vector<std::vector<std::size_t>> oracle_orders;
  const bool need_oracle = std::any_of(choices.begin(), choices.end(),
                                       [](const LayoutChoice& lc) { return lc.oracle_ranking; });
  if (need_oracle) {
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!evaluators[i]) throw std::invalid_argument("oracle ranking needs JPEG inputs: " + files[i].name);
      oracle_orders.push_back(oracle_bit_order(files[i].bytes, c.ref_db, c.threads));
    }
  }

  struct Prepared {
    EncodedUnit unit;
    std::vector<std::string> strands;
    std::vector<std::vector<std::size_t>> orders;
  };
  std::vector<Prepared> prepared;
  for (const LayoutChoice& lc : choices) {
    std::vector<InputFile> in = files;
    std::vector<std::vector<std::size_t>> orders;
    if (lc.oracle_ranking) {
      for (std::size_t i = 0; i < in.size(); ++i) in[i].bit_order = oracle_orders[i];
      orders = oracle_orders;
    }
    EncodedUnit unit = encode_files(in, c.geometry(lc.strategy));
    auto strands = channel_strands(unit);
    prepared.push_back({std::move(unit), std::move(strands), std::move(orders)});
  }

  SweepResult out;
  for (const auto& f : files) out.file_names.push_back(f.name);
  const std::size_t nl = choices.size(), nn = c.coverages.size(), np = c.error_rates.size();
  const auto nt = static_cast<std::size_t>(c.trials);
  out.records.resize(np * nn * nl * nt);
  parallel_for(out.records.size(), c.threads, [&](std::size_t idx) {
    const std::size_t t = idx % nt;
    const std::size_t li = (idx / nt) % nl;
    const std::size_t ni = (idx / (nt * nl)) % nn;
    const std::size_t pi = idx / (nt * nl * nn);
    const auto start = std::chrono::steady_clock::now();
    const Prepared& prep = prepared[li];
    RunRecord rec;
    rec.layout = choices[li].label();
    rec.p = c.error_rates[pi];
    rec.coverage = c.coverages[ni];
    rec.trial = static_cast<int>(t);
    const EncodingMatrix rx = simulate_trial(prep.unit, prep.strands, c.channel(rec.p),
                                             c.coverage(rec.coverage), t, c.drop_last_columns);
    const DecodedUnit dec = decode_unit(rx, prep.unit.geometry, prep.unit.layout, prep.unit.table, prep.orders, 1);
    rec.failed_codewords = dec.recovered.report.failed();
    rec.decode_success = rec.failed_codewords == 0;
    for (std::size_t f = 0; f < files.size(); ++f) {
      const auto& got = dec.files[f].bytes;
      if (evaluators[f]) {
        rec.losses.push_back((*evaluators[f])(got));
      } else if (got == files[f].bytes) {
        rec.losses.push_back({});
      } else {
        rec.losses.push_back(QualityResult::undecodable_result());
      }
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[idx] = std::move(rec);
  });
  return out;
}

void write_sweep_csv(std::ostream& os, const ExperimentConfig& c, const SweepResult& r) {
  write_csv_header(os, "sweep", c);
  os << "# files=";
  for (std::size_t i = 0; i < r.file_names.size(); ++i) os << (i ? ";" : "") << r.file_names[i];
  os << '\n';
  os << "layout,p,coverage,trial,decode_success,failed_codewords,undecodable_files,mean_loss_db";
  for (std::size_t i = 0; i < r.file_names.size(); ++i) os << ",loss_" << i;
  if (c.timing) os << ",wall_ms";
  os << '\n';
  for (const RunRecord& rec : r.records) {
    os << rec.layout << ',' << fmt_g(rec.p) << ',' << rec.coverage << ',' << rec.trial << ','
       << (rec.decode_success ? 1 : 0) << ',' << rec.failed_codewords << ',' << rec.undecodable_files()
       << ',' << fmt(rec.mean_loss());
    for (const auto& q : rec.losses) os << ',' << loss_cell(q);
    if (c.timing) os << ',' << fmt(rec.wall_ms, 3);
    os << '\n';
  }
}

void write_sweep_summary_csv(std::ostream& os, const ExperimentConfig& c, const SweepResult& r) {
  write_csv_header(os, "sweep-summary", c);
  os << "layout,p,coverage,trials,mean_loss_db,undecodable_rate,failure_rate\n";
  for (const SweepPoint& pt : r.summary()) {
    os << pt.layout << ',' << fmt_g(pt.p) << ',' << pt.coverage << ',' << pt.trials << ','
       << fmt(pt.mean_loss_db) << ',' << fmt(pt.undecodable_rate) << ',' << fmt(pt.failure_rate) << '\n';
  }
}

// --- bit profile ----------------------------------------------------------------

std::vector<BitProfileRow> run_bit_profile(const std::vector<std::uint8_t>& jpeg, std::size_t stride,
                                           double ref_db, int threads) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const QualityEvaluator ev(jpeg, ref_db);
  const std::size_t nbits = jpeg.size() * 8;
  std::vector<BitProfileRow> rows((nbits + stride - 1) / stride);
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    std::vector<std::uint8_t> copy = jpeg;
    const std::size_t bit = i * stride;
    copy[bit >> 3] ^= static_cast<std::uint8_t>(0x80u >> (bit & 7));
    rows[i] = {bit, ev(copy)};
  });
  return rows;
}

void write_bit_profile_csv(std::ostream& os, const ExperimentConfig& c, const std::vector<BitProfileRow>& rows) {
  write_csv_header(os, "profile", c);
  os << "bit,byte,loss_db,undecodable\n";
  for (const auto& r : rows) {
    os << r.bit << ',' << (r.bit >> 3) << ',' << loss_cell(r.result) << ',' << (r.result.undecodable ? 1 : 0)
       << '\n';
  }
}

}  // namespace dnaskew
