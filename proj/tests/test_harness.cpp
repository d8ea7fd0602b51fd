#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iscc/harness.hpp"
#include "support.hpp"

using namespace iscc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("iscc_test_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kFiles[] = {"raw.csv",           "trials.csv", "aggregate.csv", "cdf.csv", "detection.csv",
                        "detection_trials.csv", "manifest.json"};

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.schemes = {Scheme::Joint, Scheme::Fpcr, Scheme::Ccra};
  spec.trials = 3;
  spec.seed_base = 11;
  spec.sweep = SweepVariable::OffloadRatio;
  spec.grid = {0.1, 0.2};
  spec.detection_ranges = {20.0, 40.0, 80.0};
  spec.threads = 1;
  return spec;
}

}  // namespace

TEST_CASE("sweep variables") {
  CHECK(parse_sweep("eta") == SweepVariable::OffloadRatio);
  CHECK(parse_sweep("offload_ratio") == SweepVariable::OffloadRatio);
  CHECK(parse_sweep("mec_capacity") == SweepVariable::MecCapacity);
  CHECK_FALSE(parse_sweep("bogus").has_value());
  for (auto v : {SweepVariable::None, SweepVariable::OffloadRatio, SweepVariable::MecCapacity,
                 SweepVariable::SinrThreshold, SweepVariable::NumVehicles, SweepVariable::NumSubbands,
                 SweepVariable::MaxPower, SweepVariable::TargetDistance, SweepVariable::CsiError}) {
    CHECK(parse_sweep(sweep_name(v)) == v);
  }
  const SystemConfig c = apply_sweep(desk_profile(), SweepVariable::NumVehicles, 16);
  CHECK(c.num_vehicles == 16);
  CHECK(apply_sweep(desk_profile(), SweepVariable::MecCapacity, 2e10).mec_capacity == 2e10);
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec spec;
  CHECK_NOTHROW(validate(spec));
  spec.trials = 0;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec = ExperimentSpec{};
  spec.schemes.clear();
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec = ExperimentSpec{};
  spec.sweep = SweepVariable::OffloadRatio;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec.grid = {0.3, 0.1};
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec.grid = {0.1, 0.3};
  CHECK_NOTHROW(validate(spec));
}

TEST_CASE("one trial of one scheme wraps a single report") {
  ExperimentSpec spec;
  spec.schemes = {Scheme::Joint};
  spec.trials = 1;
  spec.seed_base = 5;
  const AggregateResult r = run_experiment(spec, desk_profile());
  REQUIRE(r.records.size() == 1);
  REQUIRE(r.aggregates.size() == 1);
  const TrialRecord& rec = r.records.front();
  CHECK(rec.ok);
  CHECK(rec.seed == 5);
  CHECK(rec.latency.size() == 12);
  CHECK(r.aggregates.front().trials == 1);
  CHECK(r.aggregates.front().mean_max_latency == rec.max_latency);
  CHECK(r.detection_ranges.size() == 20);
  CHECK(r.detection_ranges.front() == 10.0);
  CHECK(r.detection_ranges.back() == 200.0);

  const RunResult direct = run_joint(make_scenario(desk_profile(), 5));
  CHECK(rec.max_latency == round9(direct.report.objective));
}

TEST_CASE("records, files and replay") {
  const SystemConfig config = desk_profile();
  const ExperimentSpec spec = small_spec();
  const AggregateResult first = run_experiment(spec, config);
  REQUIRE(first.records.size() == 2 * 3 * 3);
  CHECK(first.aggregates.size() == 2 * 3);
  for (const auto& rec : first.records) CHECK(rec.seed == spec.seed_base + static_cast<std::uint64_t>(rec.trial));

  const fs::path a = scratch("a"), b = scratch("b"), c = scratch("c");
  write_outputs(first, a.string());

  SUBCASE("identical reruns and thread counts give identical bytes") {
    ExperimentSpec threaded = spec;
    threaded.threads = 3;
    write_outputs(run_experiment(threaded, config), b.string());
    for (const char* f : kFiles) {
      CAPTURE(f);
      CHECK(slurp(a / f) == slurp(b / f));
      CHECK_FALSE(slurp(a / f).empty());
    }
    CHECK(slurp(a / "manifest.json").find("wall") == std::string::npos);
  }

  SUBCASE("aggregates recomputed from the files match") {
    AggregateResult replay = first;
    replay.records = read_records(a.string());
    REQUIRE(replay.records.size() == first.records.size());
    for (std::size_t i = 0; i < first.records.size(); ++i) {
      const auto& x = first.records[i];
      const auto& y = replay.records[i];
      CHECK(x.scheme == y.scheme);
      CHECK(x.max_latency == y.max_latency);
      CHECK(x.latency == y.latency);
      CHECK(x.sensing_sinr == y.sensing_sinr);
      CHECK(x.detection_curve == y.detection_curve);
      CHECK(x.band == y.band);
    }
    replay.aggregates.clear();
    aggregate(replay);
    REQUIRE(replay.aggregates.size() == first.aggregates.size());
    for (std::size_t i = 0; i < first.aggregates.size(); ++i) {
      CHECK(replay.aggregates[i].mean_max_latency == first.aggregates[i].mean_max_latency);
      CHECK(replay.aggregates[i].mean_min_sensing_sinr_db == first.aggregates[i].mean_min_sensing_sinr_db);
      CHECK(replay.aggregates[i].detection_curve == first.aggregates[i].detection_curve);
    }
    write_outputs(replay, c.string());
    CHECK(slurp(a / "aggregate.csv") == slurp(c / "aggregate.csv"));
    CHECK(slurp(a / "cdf.csv") == slurp(c / "cdf.csv"));
  }
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("nine significant digits") {
  CHECK(round9(0.1234567891234) == 0.123456789);
  CHECK(round9(123456789012.0) == 123456789000.0);
  CHECK(round9(0.0) == 0.0);
  CHECK(round9(round9(3.14159265358979)) == round9(3.14159265358979));
}

TEST_CASE("detection curves") {
  std::vector<double> ranges;
  for (double d = 10; d <= 200; d += 10) ranges.push_back(d);

  SUBCASE("nonincreasing in distance") {
    for (int t = 0; t < 5; ++t) {
      const Scenario s = make_scenario(desk_profile(), 2000 + t);
      for (Scheme scheme : {Scheme::Joint, Scheme::Fpcr}) {
        const auto curve = detection_curve(run_scheme(scheme, s), s, ranges);
        for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1]);
      }
    }
  }
  SUBCASE("a higher threshold shifts the curve outward") {
    ExperimentSpec spec;
    spec.schemes = {Scheme::Joint};
    spec.trials = 10;
    spec.seed_base = 2100;
    spec.sweep = SweepVariable::SinrThreshold;
    spec.grid = {100.0, 200.0};
    spec.detection_ranges = ranges;
    const AggregateResult r = run_experiment(spec, desk_profile());
    REQUIRE(r.aggregates.size() == 2);
    const auto& low = r.aggregates[0].detection_curve;
    const auto& high = r.aggregates[1].detection_curve;
    for (std::size_t i = 0; i < ranges.size(); ++i) CHECK(high[i] >= low[i]);
    CHECK(r.aggregates[0].mean_detection_dmin >= 0.99);
  }
}
