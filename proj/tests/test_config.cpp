#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "iscc/config.hpp"

using namespace iscc;

TEST_CASE("full-scale profile carries the simulation table values") {
  const SystemConfig c = paper_profile();
  CHECK(c.num_antennas == 4);
  CHECK(c.num_bs == 4);
  CHECK(c.num_vehicles == 48);
  CHECK(c.num_subbands == 5);
  CHECK(c.subband_bandwidth == 10e6);
  CHECK(c.local_intensity == 50.0);
  CHECK(c.mec_intensity == 400.0);
  CHECK(c.max_local_cpu == 1e9);
  CHECK(c.mec_capacity == 30e9);
  CHECK(c.max_power == doctest::Approx(1.0));
  CHECK(c.noise_power_bs == doctest::Approx(1e-13));
  CHECK(c.power_coeff == 1e-26);
  CHECK(c.beam_width == 16);
  CHECK(c.accum_symbols == 500);
  CHECK(c.sinr_threshold == doctest::Approx(100.0));
  CHECK(c.min_detect_dist == 40.0);
  CHECK(c.ref_pathloss == doctest::Approx(1e-3));
  CHECK(c.rcs_lo == 0.8);
  CHECK(c.rcs_hi == 1.0);
  CHECK(c.task_bits() == 1e6);
  CHECK(validate(c).empty());
}

TEST_CASE("desk profile is K=12, M=2, L=3 and valid") {
  const SystemConfig c = desk_profile();
  CHECK(c.num_vehicles == 12);
  CHECK(c.num_bs == 2);
  CHECK(c.num_subbands == 3);
  CHECK(validate(c).empty());
}

TEST_CASE("validation reports each broken invariant") {
  SystemConfig c;
  c.num_subbands = 12;  // K/M = 12
  CHECK(validate(c).size() == 1);
  c = SystemConfig{};
  c.offload_ratio = 0.0;
  CHECK_FALSE(validate(c).empty());
  c.offload_ratio = 1.0;
  CHECK(validate(c).empty());
  c.offload_ratio = 1.5;
  CHECK_FALSE(validate(c).empty());
  c = SystemConfig{};
  c.false_alarm = 1.0;
  CHECK_FALSE(validate(c).empty());
  c = SystemConfig{};
  c.max_power = -1.0;
  c.subband_bandwidth = 0.0;
  CHECK(validate(c).size() == 2);
  c = SystemConfig{};
  c.num_bs = 5;
  CHECK_FALSE(validate(c).empty());
}

TEST_CASE("dB and dBm keys convert at the boundary") {
  SystemConfig c;
  apply_setting(c, "max_power_dbm", "30");
  CHECK(c.max_power == doctest::Approx(1.0).epsilon(1e-15));
  apply_setting(c, "noise_power_bs_dbm", "-100");
  CHECK(c.noise_power_bs == doctest::Approx(1e-13).epsilon(1e-15));
  apply_setting(c, "sinr_threshold_db", "20");
  CHECK(c.sinr_threshold == doctest::Approx(100.0).epsilon(1e-15));
  apply_setting(c, "ref_pathloss_db", "-30");
  CHECK(c.ref_pathloss == doctest::Approx(1e-3).epsilon(1e-15));
  apply_setting(c, "max_power", "0.5");
  CHECK(c.max_power == 0.5);
}

TEST_CASE("bad keys and values are rejected") {
  SystemConfig c;
  CHECK_THROWS_AS(apply_setting(c, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "num_vehicles_db", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "offload_ratio_dbm", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "num_vehicles", "twelve"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "max_power", "1W"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/iscc.conf"), ConfigError);
}

TEST_CASE("config files parse comments and report line numbers") {
  std::istringstream in("# header\nnum_vehicles = 16   # inline\n\n  offload_ratio=0.2\nsinr_threshold_db = 10\n");
  const SystemConfig c = parse_config(in);
  CHECK(c.num_vehicles == 16);
  CHECK(c.offload_ratio == 0.2);
  CHECK(c.sinr_threshold == doctest::Approx(10.0));

  std::istringstream bad("num_vehicles = 16\nthis line has no equals\n");
  try {
    parse_config(bad);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("text form round-trips every field exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int t = 0; t < 20; ++t) {
    SystemConfig c;
    c.offload_ratio = u(rng) / 10.0;
    c.mec_capacity = u(rng) * 1e10;
    c.noise_power_bs = u(rng) * 1e-13;
    c.sinr_threshold = u(rng) * 37.0;
    c.power_coeff = u(rng) * 1e-27;
    c.num_vehicles = 10 + t;
    c.rng_seed = rng();
    std::istringstream in(to_text(c));
    const SystemConfig back = parse_config(in);
    CHECK(to_text(back) == to_text(c));
    CHECK(back.offload_ratio == c.offload_ratio);
    CHECK(back.power_coeff == c.power_coeff);
    CHECK(back.rng_seed == c.rng_seed);
  }
}

TEST_CASE("every documented key appears in the text form") {
  const std::string text = to_text(SystemConfig{});
  for (const auto& key : config_keys()) CHECK(text.find(key + " = ") != std::string::npos);
}
