// dnaskew: encode files into DNA strands, decode them back, and run the
// reliability-skew experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dnaskew/consensus.hpp"
#include "dnaskew/experiment.hpp"
#include "dnaskew/pipeline.hpp"
#include "dnaskew/quality.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dnaskew;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const fs::path& p, std::span<const std::uint8_t> bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Writes to `path`, or stdout for "" and "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  fn(out);
}

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json geometry_json(const Geometry& g) {
  return {{"m", g.m}, {"redundancy", g.redundancy}, {"rows", g.rows},
          {"strategy", to_string(g.strategy)}, {"reserved_rows", g.reserved_rows},
          {"scramble", g.scramble}};
}

Geometry geometry_from_json(const json& j) {
  Geometry g;
  g.m = j.at("m").get<int>();
  g.redundancy = j.at("redundancy").get<double>();
  g.rows = j.at("rows").get<int>();
  g.strategy = parse_strategy(j.at("strategy").get<std::string>());
  g.reserved_rows = j.value("reserved_rows", std::vector<int>{});
  g.scramble = j.value("scramble", true);
  return g;
}

std::string layout_hash(const Geometry& g, const FileTable& table, const MatrixLayout& layout) {
  std::string text = geometry_json(g).dump() + "|" + layout.describe();
  for (const auto& e : table.entries) text += "|" + e.name + ":" + std::to_string(e.size);
  return fnv_hex(text);
}

ErrorBreakdown parse_breakdown(const std::string& s) {
  if (s == "equal") return ErrorBreakdown::equal();
  if (s == "sub" || s == "substitution") return ErrorBreakdown::substitutions_only();
  ErrorBreakdown b;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> b.substitution >> c1 >> b.deletion >> c2 >> b.insertion) || c1 != ',' || c2 != ',') {
    throw UsageError("breakdown must be 'equal', 'sub' or 'S,D,I'");
  }
  const double sum = b.substitution + b.deletion + b.insertion;
  if (sum <= 0) throw UsageError("breakdown must have a positive sum");
  b.substitution /= sum;
  b.deletion /= sum;
  b.insertion /= sum;
  return b;
}

// --- shared experiment options ------------------------------------------------

struct ExperimentFlags {
  std::string config_path;
  std::string out;
  int m = 0;
  double redundancy = 0;
  int rows = 0;
  std::vector<int> reserved_rows;
  std::vector<std::string> layouts;
  std::vector<double> p;
  std::string breakdown;
  std::string coverage_model;
  double gamma_shape = 0;
  std::vector<int> coverage;
  int min_coverage_start = 0;
  int max_coverage = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  int drop_last = 0;
  double ref_db = 0;
  std::size_t stride = 0;
  bool timing = false;
  int threads = 1;
  std::vector<CLI::Option*> opts;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file; flags override its values")
        ->check(CLI::ExistingFile);
    app->add_option("-o,--out", out, "output CSV (default stdout)");
    reg(app->add_option("--m", m, "symbol width in bits"));
    reg(app->add_option("--redundancy", redundancy, "parity fraction E/K"));
    reg(app->add_option("--rows", rows, "matrix rows R"));
    reg(app->add_option("--reserved-rows", reserved_rows, "rows kept out of Gini diagonals"));
    reg(app->add_option("--layouts", layouts, "baseline gini dnamapper dnamapper_oracle"));
    reg(app->add_option("--p", p, "error rates"));
    reg(app->add_option("--breakdown", breakdown, "equal | sub | S,D,I"));
    reg(app->add_option("--coverage-model", coverage_model, "fixed | gamma"));
    reg(app->add_option("--gamma-shape", gamma_shape, "shape of the gamma coverage model"));
    reg(app->add_option("--coverage", coverage, "coverages (mean for gamma)"));
    reg(app->add_option("--min-coverage-start", min_coverage_start, "first coverage tried by mincov"));
    reg(app->add_option("--max-coverage", max_coverage, "last coverage tried by mincov"));
    reg(app->add_option("--trials", trials, "trials per point"));
    reg(app->add_option("--seed", seed, "RNG seed"));
    reg(app->add_option("--drop-last", drop_last, "erase the last d columns of every trial"));
    reg(app->add_option("--ref-db", ref_db, "PSNR that counts as zero loss"));
    reg(app->add_option("--stride", stride, "bit stride for profile"));
    reg(app->add_flag("--timing", timing, "add wall-time columns"));
    app->add_option("-j,--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }
  void reg(CLI::Option* o) { opts.push_back(o); }
  bool given(const char* name, CLI::App* app) const { return app->get_option(name)->count() > 0; }

  ExperimentConfig resolve(CLI::App* app) const {
    ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw UsageError("cannot parse " + config_path + ": " + e.what());
      }
      c = config_from_json(j);
    }
    if (given("--m", app)) c.m = m;
    if (given("--redundancy", app)) c.redundancy = redundancy;
    if (given("--rows", app)) c.rows = rows;
    if (given("--reserved-rows", app)) c.reserved_rows = reserved_rows;
    if (given("--layouts", app)) c.layouts = layouts;
    if (given("--p", app)) c.error_rates = p;
    if (given("--breakdown", app)) c.breakdown = parse_breakdown(breakdown);
    if (given("--coverage-model", app)) c.coverage_model = coverage_model;
    if (given("--gamma-shape", app)) c.gamma_shape = gamma_shape;
    if (given("--coverage", app)) c.coverages = coverage;
    if (given("--min-coverage-start", app)) c.min_coverage_start = min_coverage_start;
    if (given("--max-coverage", app)) c.max_coverage = max_coverage;
    if (given("--trials", app)) c.trials = trials;
    if (given("--seed", app)) c.seed = seed;
    if (given("--drop-last", app)) c.drop_last_columns = drop_last;
    if (given("--ref-db", app)) c.ref_db = ref_db;
    if (given("--stride", app)) c.profile_stride = stride;
    if (given("--timing", app)) c.timing = timing;
    if (given("--threads", app) || config_path.empty()) c.threads = threads;
    c.validate();
    return c;
  }
};

// --- encode -------------------------------------------------------------------

struct EncodeFlags {
  std::vector<std::string> inputs;
  std::string strategy = "baseline";
  int m = 8;
  double redundancy = 0.184;
  int rows = 21;
  std::vector<int> reserved_rows;
  std::string strands_out = "strands.txt";
  std::string manifest_out = "manifest.json";
  std::string matrix_dump;
  bool no_scramble = false;
};

int cmd_encode(const EncodeFlags& f) {
  Geometry g;
  g.m = f.m;
  g.redundancy = f.redundancy;
  g.rows = f.rows;
  g.strategy = parse_strategy(f.strategy);
  g.reserved_rows = f.reserved_rows;
  g.scramble = !f.no_scramble;
  std::vector<InputFile> files;
  for (const auto& in : f.inputs) files.push_back({fs::path(in).filename().string(), read_file(in), {}});
  if (files.empty()) throw UsageError("nothing to encode: no input files");

  std::optional<EncodedUnit> encoded;
  try {
    encoded = encode_files(files, g);
  } catch (const CapacityError& e) {
    throw UsageError(std::string(e.what()) + " (" + std::to_string(e.requested_bits() / 8) + " bytes requested, " +
                     std::to_string(e.capacity_bits() / 8) + " bytes available)");
  }
  const EncodedUnit& unit = *encoded;
  with_output(f.strands_out, [&](std::ostream& os) {
    for (const Strand& s : unit_strands(unit, true)) os << s.bases << '\n';
  });
  json manifest;
  manifest["format"] = 1;
  manifest["geometry"] = geometry_json(g);
  manifest["strand_length"] = g.strand_layout(true).length();
  manifest["primer5"] = std::string(kDefaultPrimer5);
  manifest["primer3"] = std::string(kDefaultPrimer3);
  manifest["directory_size"] = unit.table.entries[0].size;
  json jf = json::array();
  for (std::size_t i = 1; i < unit.table.entries.size(); ++i) {
    jf.push_back({{"name", unit.table.entries[i].name}, {"size", unit.table.entries[i].size}});
  }
  manifest["files"] = jf;
  manifest["capacity_bytes"] = g.capacity_bytes();
  manifest["layout"] = unit.layout.describe();
  manifest["layout_hash"] = layout_hash(g, unit.table, unit.layout);
  with_output(f.manifest_out, [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  if (!f.matrix_dump.empty()) {
    with_output(f.matrix_dump, [&](std::ostream& os) { dump_matrix(os, unit.matrix, unit.layout); });
  }
  std::cerr << "encoded " << files.size() << " file(s), " << unit.table.total_bytes() << " of "
            << g.capacity_bytes() << " bytes, " << unit.matrix.cols << " strands\n";
  return 0;
}

// --- decode -------------------------------------------------------------------

struct DecodeFlags {
  std::string manifest;
  std::string reads;
  std::string strands;
  bool simulate = false;
  bool trim_primers = false;
  double p = 0.0;
  std::string breakdown = "equal";
  double coverage = 10;
  std::string coverage_model = "fixed";
  double gamma_shape = 4.0;
  std::uint64_t seed = 1;
  std::vector<int> drop_columns;
  std::string dump_reads;
  std::string out_dir = "decoded";
  std::string report;
  std::string reference_dir;
  double ref_db = kDefaultReferenceDb;
  int threads = 1;
};

int cmd_decode(const DecodeFlags& f) {
  json manifest;
  {
    std::ifstream in(f.manifest);
    if (!in) throw UsageError("cannot read manifest " + f.manifest);
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw UsageError("unreadable manifest: " + std::string(e.what()));
    }
  }
  Geometry g;
  FileTable table;
  try {
    g = geometry_from_json(manifest.at("geometry"));
    table.entries.push_back({"", manifest.at("directory_size").get<std::uint64_t>()});
    for (const auto& e : manifest.at("files")) {
      table.entries.push_back({e.at("name").get<std::string>(), e.at("size").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    throw UsageError("unreadable manifest: " + std::string(e.what()));
  }
  const MatrixLayout layout = make_layout(g, table);
  if (manifest.contains("layout_hash") && manifest["layout_hash"] != layout_hash(g, table, layout)) {
    throw UsageError("manifest layout hash does not match its geometry and file table");
  }
  const StrandLayout full = g.strand_layout(true);
  const StrandLayout inner = g.strand_layout(false);

  std::vector<Cluster> clusters;
  if (f.simulate) {
    if (f.strands.empty()) throw UsageError("--simulate needs --strands");
    std::ifstream in(f.strands);
    if (!in) throw UsageError("cannot read " + f.strands);
    std::vector<std::string> strands;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (static_cast<int>(line.size()) != full.length()) {
        throw UsageError("strand of length " + std::to_string(line.size()) + ", expected " +
                         std::to_string(full.length()));
      }
      strands.push_back(line.substr(full.primer5.size(), static_cast<std::size_t>(inner.length())));
    }
    ChannelConfig ch;
    ch.p = f.p;
    ch.breakdown = parse_breakdown(f.breakdown);
    ch.seed = f.seed;
    CoverageModel cov = f.coverage_model == "gamma" ? CoverageModel::gamma(f.coverage, f.gamma_shape)
                                                    : CoverageModel::fixed(static_cast<int>(f.coverage));
    if (f.coverage_model != "gamma" && f.coverage_model != "fixed") {
      throw UsageError("coverage model must be 'fixed' or 'gamma'");
    }
    clusters = make_clusters(strands, ch, cov, 0, f.threads);
  } else {
    if (f.reads.empty()) throw UsageError("decode needs --reads or --simulate");
    std::ifstream in(f.reads);
    if (!in) throw UsageError("cannot read " + f.reads);
    clusters = read_reads(in);
    if (f.trim_primers) {
      for (Cluster& c : clusters) {
        for (std::string& r : c.reads) {
          const std::size_t a = std::min(r.size(), full.primer5.size());
          r.erase(0, a);
          r.erase(r.size() - std::min(r.size(), full.primer3.size()));
        }
      }
    }
  }
  for (int col : f.drop_columns) {
    for (Cluster& c : clusters) {
      if (c.column == col) c.reads.clear();
    }
  }
  if (!f.dump_reads.empty()) {
    with_output(f.dump_reads, [&](std::ostream& os) { write_reads(os, clusters); });
  }

  const EncodingMatrix rx = reconstruct_matrix(clusters, layout, inner, f.threads);
  const DecodedUnit dec = decode_unit(rx, g, layout, table, {}, f.threads);

  fs::create_directories(f.out_dir);
  json report;
  report["success"] = dec.recovered.report.success();
  report["failed_codewords"] = dec.recovered.report.failed();
  report["directory_matches"] = dec.directory_matches;
  report["erased_columns"] = rx.erased();
  json cws = json::array();
  for (const auto& cw : dec.recovered.report.codewords) {
    cws.push_back({{"codeword", cw.codeword}, {"ok", cw.ok}, {"corrected", cw.corrected}, {"erasures", cw.erasures}});
  }
  report["codewords"] = cws;
  json files = json::array();
  for (const InputFile& file : dec.files) {
    write_file(fs::path(f.out_dir) / fs::path(file.name).filename(), file.bytes);
    json jf = {{"name", file.name}, {"size", file.bytes.size()}};
    if (!f.reference_dir.empty()) {
      const fs::path ref = fs::path(f.reference_dir) / file.name;
      if (fs::exists(ref)) {
        const auto original = read_file(ref);
        jf["identical"] = original == file.bytes;
        if (decode_jpeg(original)) {
          const QualityResult q = quality_loss(original, file.bytes, f.ref_db);
          jf["undecodable"] = q.undecodable;
          if (!q.undecodable) jf["loss_db"] = q.loss_db;
        }
      }
    }
    files.push_back(jf);
  }
  report["files"] = files;
  with_output(f.report, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DNA storage reliability-skew simulator"};
  app.require_subcommand(1);

  EncodeFlags ef;
  auto* enc = app.add_subcommand("encode", "encode files into strands plus a manifest");
  enc->add_option("inputs", ef.inputs, "files to store")->required()->check(CLI::ExistingFile);
  enc->add_option("--strategy", ef.strategy, "baseline | gini | dnamapper")->capture_default_str();
  enc->add_option("--m", ef.m, "symbol width in bits")->capture_default_str();
  enc->add_option("--redundancy", ef.redundancy, "parity fraction E/K")->capture_default_str();
  enc->add_option("--rows", ef.rows, "matrix rows R")->capture_default_str();
  enc->add_option("--reserved-rows", ef.reserved_rows, "rows kept out of Gini diagonals");
  enc->add_option("--strands", ef.strands_out, "strand file, one strand per line")->capture_default_str();
  enc->add_option("--manifest", ef.manifest_out, "manifest JSON")->capture_default_str();
  enc->add_option("--dump-matrix", ef.matrix_dump, "write the encoding matrix as CSV");
  enc->add_flag("--no-scramble", ef.no_scramble, "store the payload without the keystream XOR");

  DecodeFlags df;
  auto* dec = app.add_subcommand("decode", "reconstruct clusters and decode files");
  dec->add_option("--manifest", df.manifest, "manifest written by encode")->required();
  dec->add_option("--reads", df.reads, "reads file: cluster_id<TAB>sequence per line");
  dec->add_flag("--trim-primers", df.trim_primers, "reads still carry primer regions");
  dec->add_flag("--simulate", df.simulate, "generate reads from --strands through the channel");
  dec->add_option("--strands", df.strands, "strand file written by encode");
  dec->add_option("--p", df.p, "channel error rate")->capture_default_str();
  dec->add_option("--breakdown", df.breakdown, "equal | sub | S,D,I")->capture_default_str();
  dec->add_option("--coverage", df.coverage, "reads per strand (mean for gamma)")->capture_default_str();
  dec->add_option("--coverage-model", df.coverage_model, "fixed | gamma")->capture_default_str();
  dec->add_option("--gamma-shape", df.gamma_shape)->capture_default_str();
  dec->add_option("--seed", df.seed)->capture_default_str();
  dec->add_option("--drop-columns", df.drop_columns, "columns whose clusters are emptied");
  dec->add_option("--dump-reads", df.dump_reads, "write the simulated reads");
  dec->add_option("--out-dir", df.out_dir, "directory for recovered files")->capture_default_str();
  dec->add_option("--report", df.report, "report JSON (default stdout)");
  dec->add_option("--reference-dir", df.reference_dir, "originals for quality loss");
  dec->add_option("--ref-db", df.ref_db)->capture_default_str();
  dec->add_option("-j,--threads", df.threads)->check(CLI::NonNegativeNumber);

  ExperimentFlags skew_f, mincov_f, sweep_f, profile_f;
  auto* skew = app.add_subcommand("skew", "per-codeword error counts (or per-position consensus errors)");
  skew_f.add(skew);
  std::string skew_mode = "codeword";
  std::string algorithm = "two_way";
  int strand_length = 110;
  std::string alphabet = "ACGT";
  int window = 2;
  bool allow_large = false;
  skew->add_option("--mode", skew_mode, "codeword | position")->capture_default_str();
  skew->add_option("--algorithm", algorithm, "one_way | two_way | oracle (position mode)")->capture_default_str();
  skew->add_option("--length", strand_length, "strand length (position mode)")->capture_default_str();
  skew->add_option("--alphabet", alphabet, "strand alphabet (position mode)")->capture_default_str();
  skew->add_option("--window", window, "consensus lookahead")->capture_default_str();
  skew->add_flag("--allow-large", allow_large, "lift the oracle enumeration cap");

  auto* mincov = app.add_subcommand("mincov", "minimum error-free coverage per error rate and layout");
  mincov_f.add(mincov);

  auto* sweep = app.add_subcommand("sweep", "quality loss of stored files over error rates and coverages");
  sweep_f.add(sweep);
  std::vector<std::string> sweep_inputs;
  std::string summary_out;
  sweep->add_option("--input", sweep_inputs, "files to store (JPEG for quality)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--summary", summary_out, "also write per-point averages");

  auto* profile = app.add_subcommand("profile", "quality loss of single-bit flips in a JPEG");
  profile_f.add(profile);
  std::string profile_input;
  profile->add_option("--input", profile_input, "JPEG file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*enc) return cmd_encode(ef);
    if (*dec) return cmd_decode(df);
    if (*skew) {
      ExperimentConfig c = skew_f.resolve(skew);
      if (skew_mode == "codeword") {
        const SkewResult r = run_skew(c);
        with_output(skew_f.out, [&](std::ostream& os) { write_skew_csv(os, c, r); });
      } else if (skew_mode == "position") {
        if (c.error_rates.size() != 1 || c.coverages.size() != 1) {
          throw UsageError("position mode takes exactly one --p and one --coverage");
        }
        SkewConfig s;
        s.p = c.error_rates[0];
        s.breakdown = c.breakdown;
        s.coverage = c.coverages[0];
        s.length = strand_length;
        s.algorithm = parse_reconstructor(algorithm);
        s.trials = static_cast<std::size_t>(c.trials);
        s.seed = c.seed;
        s.alphabet = alphabet;
        s.window = window;
        s.threads = c.threads;
        s.allow_large = allow_large;
        const SkewProfile prof = skew_profile(s);
        with_output(skew_f.out, [&](std::ostream& os) {
          write_csv_header(os, "skew-position", c);
          os << "# algorithm=" << to_string(s.algorithm) << " length=" << s.length << " alphabet=" << s.alphabet
             << " window=" << s.window << '\n';
          write_skew_profile_csv(os, prof);
        });
      } else {
        throw UsageError("--mode must be 'codeword' or 'position'");
      }
      return 0;
    }
    if (*mincov) {
      ExperimentConfig c = mincov_f.resolve(mincov);
      const auto rows = run_min_coverage(c);
      with_output(mincov_f.out, [&](std::ostream& os) { write_min_coverage_csv(os, c, rows); });
      return 0;
    }
    if (*sweep) {
      ExperimentConfig c = sweep_f.resolve(sweep);
      std::vector<InputFile> files;
      for (const auto& in : sweep_inputs) files.push_back({fs::path(in).filename().string(), read_file(in), {}});
      const SweepResult r = run_quality_sweep(c, files);
      with_output(sweep_f.out, [&](std::ostream& os) { write_sweep_csv(os, c, r); });
      if (!summary_out.empty()) {
        with_output(summary_out, [&](std::ostream& os) { write_sweep_summary_csv(os, c, r); });
      }
      return 0;
    }
    if (*profile) {
      ExperimentConfig c = profile_f.resolve(profile);
      const auto jpeg = read_file(profile_input);
      if (!decode_jpeg(jpeg)) throw UsageError(profile_input + " is not a decodable JPEG");
      const auto rows = run_bit_profile(jpeg, c.profile_stride, c.ref_db, c.threads);
      with_output(profile_f.out, [&](std::ostream& os) { write_bit_profile_csv(os, c, rows); });
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
