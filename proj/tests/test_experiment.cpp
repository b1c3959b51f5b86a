#include <doctest.h>

#include <numeric>
#include <sstream>

#include "corpus.hpp"
#include "dnaskew/experiment.hpp"

using namespace dnaskew;

namespace {

template <typename Fn>
std::string capture(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::vector<InputFile> jpeg_files() {
  return {{"a.jpg", testutil::test_jpeg(40, 32, 1, 70), {}},
          {"b.jpg", testutil::test_jpeg(32, 32, 2, 60), {}}};
}

}  // namespace

TEST_CASE("config json round trip and strictness") {
  ExperimentConfig c;
  c.error_rates = {0.03, 0.12};
  c.coverages = {4, 8};
  c.layouts = {"gini", "dnamapper_oracle"};
  c.coverage_model = "gamma";
  c.seed = 42;
  c.breakdown = {0.5, 0.25, 0.25};
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  c.threads = 8;
  CHECK(config_hash(back) == config_hash(c));
  c.seed = 43;
  CHECK(config_hash(back) != config_hash(c));

  auto j = to_json(c);
  j["coverage"] = 3;
  CHECK_THROWS(config_from_json(j));
  CHECK(config_from_json(nlohmann::json::object()).trials == 50);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.layouts = {"diagonal"};
  CHECK_THROWS(c.validate());
  c = {};
  c.coverage_model = "poisson";
  CHECK_THROWS(c.validate());
  c = {};
  c.trials = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("layout choice labels") {
  CHECK(LayoutChoice::parse("dnamapper_oracle").oracle_ranking);
  CHECK(LayoutChoice::parse("dnamapper_oracle").label() == "dnamapper_oracle");
  CHECK(LayoutChoice::parse("gini").strategy == Strategy::Gini);
  CHECK_THROWS(LayoutChoice::parse("oracle"));
}

TEST_CASE("csv header") {
  ExperimentConfig c;
  const std::string h = capture([&](std::ostream& os) { write_csv_header(os, "sweep", c); });
  CHECK(h.rfind("# dnaskew sweep schema=1\n", 0) == 0);
  CHECK(h.find("# config_hash=" + config_hash(c) + " seed=1\n") != std::string::npos);
  CHECK(h.find("# config={") != std::string::npos);
}

TEST_CASE("skew: noiseless is zero, noisy conserves totals") {
  ExperimentConfig c;
  c.trials = 4;
  c.error_rates = {0.0};
  c.coverages = {2};
  const SkewResult zero = run_skew(c);
  CHECK(zero.total() == 0);
  CHECK(zero.baseline.size() == 21);

  c.error_rates = {0.09};
  c.coverages = {5};
  const SkewResult r = run_skew(c);
  const auto sb = std::accumulate(r.baseline.begin(), r.baseline.end(), std::uint64_t{0});
  const auto sg = std::accumulate(r.gini.begin(), r.gini.end(), std::uint64_t{0});
  CHECK(sb == sg);
  CHECK(sb > 0);
  c.threads = 3;
  CHECK(run_skew(c).gini == r.gini);

  c.coverages = {5, 6};
  CHECK_THROWS(run_skew(c));
}

TEST_CASE("dropped columns count as errors in every codeword") {
  ExperimentConfig c;
  c.trials = 2;
  c.error_rates = {0.0};
  c.coverages = {1};
  c.drop_last_columns = 3;
  const SkewResult r = run_skew(c);
  for (auto v : r.baseline) CHECK(v == 6);
  for (auto v : r.gini) CHECK(v == 6);
}

TEST_CASE("mincov: p=0 needs one read, a hopeless channel reports none") {
  ExperimentConfig c;
  c.trials = 2;
  c.error_rates = {0.0};
  c.max_coverage = 3;
  const auto rows = run_min_coverage(c);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.min_coverage == 1);

  c.error_rates = {0.6};
  c.layouts = {"baseline"};
  const auto bad = run_min_coverage(c);
  CHECK_FALSE(bad[0].min_coverage.has_value());
  const std::string csv = capture([&](std::ostream& os) { write_min_coverage_csv(os, c, bad); });
  CHECK(csv.find("p,layout,min_coverage\n") != std::string::npos);
  CHECK(csv.find(",baseline,>3") != std::string::npos);
}

TEST_CASE("sweep: noiseless has no loss and results do not depend on threads") {
  ExperimentConfig c;
  c.trials = 2;
  c.error_rates = {0.0, 0.12};
  c.coverages = {3};
  const auto files = jpeg_files();
  const SweepResult r = run_quality_sweep(c, files);
  const auto pts = r.summary();
  REQUIRE(pts.size() == 6);
  for (const auto& p : pts) {
    if (p.p == 0.0) {
      CHECK(p.mean_loss_db == 0.0);
      CHECK(p.undecodable_rate == 0.0);
      CHECK(p.failure_rate == 0.0);
    }
  }
  c.threads = 4;
  const SweepResult r4 = run_quality_sweep(c, files);
  CHECK(capture([&](std::ostream& os) { write_sweep_csv(os, c, r); }) ==
        capture([&](std::ostream& os) { write_sweep_csv(os, c, r4); }));
  CHECK(capture([&](std::ostream& os) { write_sweep_summary_csv(os, c, r); }) ==
        capture([&](std::ostream& os) { write_sweep_summary_csv(os, c, r4); }));
}

TEST_CASE("run record aggregation") {
  RunRecord rr;
  rr.losses = {QualityResult{false, 2.0, 48.0}, QualityResult::undecodable_result(), QualityResult{false, 4.0, 46.0}};
  CHECK(rr.undecodable_files() == 1);
  CHECK(rr.mean_loss() == doctest::Approx(3.0));
  RunRecord none;
  none.losses = {QualityResult::undecodable_result()};
  CHECK(none.mean_loss() == 0.0);
}

TEST_CASE("bit profile samples every stride-th bit") {
  const auto jpeg = testutil::test_jpeg();
  const std::size_t stride = 97;
  const auto rows = run_bit_profile(jpeg, stride, 50.0, 2);
  CHECK(rows.size() == (jpeg.size() * 8 + stride - 1) / stride);
  CHECK(rows[1].bit == stride);
  ExperimentConfig c;
  const std::string csv = capture([&](std::ostream& os) { write_bit_profile_csv(os, c, rows); });
  CHECK(csv.find("# dnaskew profile") != std::string::npos);
}
