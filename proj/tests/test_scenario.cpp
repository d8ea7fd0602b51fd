#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "iscc/oracles.hpp"
#include "iscc/scenario.hpp"
#include "support.hpp"

using namespace iscc;

TEST_CASE("base stations sit on the corners of the 400 m square") {
  const Topology t = generate_topology(SystemConfig{}, 1);
  REQUIRE(t.bs_positions.size() == 4);
  CHECK(t.bs_positions[0] == Point(0, 0));
  CHECK(t.bs_positions[1] == Point(0, 400));
  CHECK(t.bs_positions[2] == Point(400, 400));
  CHECK(t.bs_positions[3] == Point(400, 0));
}

TEST_CASE("topology is deterministic and inside the region") {
  const SystemConfig c;
  const Topology a = generate_topology(c, 42);
  const Topology b = generate_topology(c, 42);
  const Topology other = generate_topology(c, 43);
  REQUIRE(a.vehicle_positions.size() == 48);
  bool differs = false;
  for (std::size_t k = 0; k < a.vehicle_positions.size(); ++k) {
    CHECK(a.vehicle_positions[k] == b.vehicle_positions[k]);
    differs = differs || a.vehicle_positions[k] != other.vehicle_positions[k];
    CHECK(a.vehicle_positions[k].minCoeff() >= kRegionMin);
    CHECK(a.vehicle_positions[k].maxCoeff() <= kRegionMax);
  }
  CHECK(differs);
  CHECK(a.target_distances == b.target_distances);
  CHECK(a.target_distances.minCoeff() >= c.min_detect_dist / 2);
  CHECK(a.target_distances.maxCoeff() <= 2 * c.min_detect_dist);
}

TEST_CASE("vehicles lie on the lane grid") {
  const Topology t = generate_topology(SystemConfig{}, 5);
  const double lanes[] = {-100.0, 100.0, 300.0, 500.0};
  for (const Point& p : t.vehicle_positions) {
    bool on_lane = false;
    for (double lane : lanes) on_lane = on_lane || p.x() == lane || p.y() == lane;
    CHECK(on_lane);
  }
}

TEST_CASE("a fixed target distance overrides the draw") {
  SystemConfig c;
  c.target_distance = 55.0;
  const Topology t = generate_topology(c, 3);
  CHECK((t.target_distances.array() == 55.0).all());
}

TEST_CASE("association balances load") {
  SUBCASE("K=48, M=4 gives 12 per BS") {
    const SystemConfig c;
    const Association a = associate(generate_topology(c, 9), c);
    for (const auto& served : a.served) CHECK(served.size() == 12);
  }
  SUBCASE("uneven K differs by at most one") {
    for (int K : {13, 14, 15, 17, 21}) {
      SystemConfig c;
      c.num_vehicles = K;
      const Association a = associate(generate_topology(c, 11), c);
      std::size_t lo = K, hi = 0, total = 0;
      for (const auto& served : a.served) {
        lo = std::min(lo, served.size());
        hi = std::max(hi, served.size());
        total += served.size();
        CHECK(std::is_sorted(served.begin(), served.end()));
      }
      CHECK(hi - lo <= 1);
      CHECK(total == static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) {
        const auto& mine = a.served[a.serving_bs[k]];
        CHECK(std::find(mine.begin(), mine.end(), k) != mine.end());
      }
    }
  }
  SUBCASE("K=1, M=1") {
    const SystemConfig c = test::sized(1, 1, 1);
    const Association a = associate(generate_topology(c, 1), c);
    CHECK(a.serving_bs == std::vector<int>{0});
  }
  SUBCASE("a vehicle on top of a BS is served by it") {
    SystemConfig c = test::sized(4, 2, 1);
    Topology t;
    t.bs_positions = {Point(0, 0), Point(0, 400)};
    t.vehicle_positions = {Point(0, 400), Point(0, 10), Point(0, 20), Point(0, 390)};
    t.target_distances = Eigen::VectorXd::Constant(4, 40.0);
    const Association a = associate(t, c);
    CHECK(a.serving_bs[0] == 1);
    CHECK(a.serving_bs[1] == 0);
  }
}

TEST_CASE("echo amplitude follows the radar range equation") {
  const double a = sensing_amplitude(1e-3, 1.0, 1.0, 1.0, 40.0);
  CHECK(a * a == doctest::Approx(1e-3 / std::pow(4 * std::numbers::pi * 1600.0, 2)).epsilon(1e-14));
  CHECK(a * a == doctest::Approx(2.476e-12).epsilon(1e-3));
  CHECK(a == doctest::Approx(oracles::echo_amplitude(1e-3, 1.0, 1.0, 1.0, 40.0)).epsilon(1e-14));
  double previous = INFINITY;
  for (double d = 5.0; d < 500.0; d *= 1.3) {
    const double v = sensing_amplitude(1e-3, 1.0, 1.0, 0.9, d);
    CHECK(v < previous);
    previous = v;
  }
  CHECK(sensing_amplitude(1e-3, 1.0, 1.0, 0.64, 40.0) ==
        doctest::Approx(0.8 * sensing_amplitude(1e-3, 1.0, 1.0, 1.0, 40.0)).epsilon(1e-14));
}

TEST_CASE("channel draws are deterministic per seed") {
  const SystemConfig c = desk_profile();
  const Scenario a = make_scenario(c, 17);
  const Scenario b = make_scenario(c, 17);
  const Scenario other = make_scenario(c, 18);
  for (int l = 0; l < c.num_subbands; ++l) {
    CHECK(a.channels.cross(l) == b.channels.cross(l));
    for (int m = 0; m < c.num_bs; ++m) CHECK(a.channels.uplink(l, m) == b.channels.uplink(l, m));
  }
  CHECK(a.channels.rcs == b.channels.rcs);
  CHECK(a.channels.uplink(0, 0) != other.channels.uplink(0, 0));
  CHECK(a.channels.rcs.minCoeff() >= c.rcs_lo);
  CHECK(a.channels.rcs.maxCoeff() <= c.rcs_hi);
  CHECK((a.task_bits.array() == 1e6).all());
}

TEST_CASE("sensing amplitudes match the formula at both distances") {
  const SystemConfig c = desk_profile();
  const Scenario s = make_scenario(c, 4);
  for (int k = 0; k < c.num_vehicles; ++k) {
    const double xi = s.channels.rcs[k];
    CHECK(s.channels.sensing_amp_min[k] ==
          doctest::Approx(oracles::echo_amplitude(c.ref_pathloss, c.tx_gain, c.rx_aperture, xi, c.min_detect_dist))
              .epsilon(1e-14));
    CHECK(s.channels.sensing_amp[k] ==
          doctest::Approx(oracles::echo_amplitude(c.ref_pathloss, c.tx_gain, c.rx_aperture, xi,
                                                  s.topology.target_distances[k]))
              .epsilon(1e-14));
  }
}

TEST_CASE("uplink fading has unit variance per antenna at 1 m scale") {
  SystemConfig c = test::sized(1, 1, 1);
  Topology t;
  t.bs_positions = {Point(0, 0)};
  t.vehicle_positions = {Point(1, 0)};
  t.target_distances = Eigen::VectorXd::Constant(1, 40.0);
  const Association a = associate(t, c);
  const int draws = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < draws; ++s) {
    const ChannelSet ch = sample_channels(c, t, a, static_cast<std::uint64_t>(s) + 1);
    const double v = ch.uplink(0, 0).col(0).squaredNorm() / (c.num_antennas * c.ref_pathloss);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 1.0) <= 3 * sd);
}

TEST_CASE("coincident positions are rejected") {
  SystemConfig c = test::sized(2, 1, 1);
  Topology t;
  t.bs_positions = {Point(0, 0)};
  t.vehicle_positions = {Point(0, 0), Point(5, 0)};
  t.target_distances = Eigen::VectorXd::Constant(2, 40.0);
  CHECK_THROWS_AS(sample_channels(c, t, associate(t, c), 1), GeometryError);
  t.vehicle_positions = {Point(5, 0), Point(5, 0)};
  CHECK_THROWS_AS(sample_channels(c, t, associate(t, c), 1), GeometryError);
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}

TEST_CASE("imperfect CSI estimate") {
  SystemConfig c = desk_profile();
  const Scenario truth = make_scenario(c, 31);

  SUBCASE("zero error leaves the channels untouched") {
    const Scenario est = estimated_scenario(truth);
    for (int l = 0; l < c.num_subbands; ++l) {
      CHECK(est.channels.cross(l) == truth.channels.cross(l));
      for (int m = 0; m < c.num_bs; ++m) CHECK(est.channels.uplink(l, m) == truth.channels.uplink(l, m));
    }
  }
  SUBCASE("multiplicative error has the configured variance") {
    c.csi_error = 0.04;
    const Scenario s = make_scenario(c, 31);
    const Scenario est = estimated_scenario(s);
    const Scenario again = estimated_scenario(s);
    double acc = 0.0, mean_re = 0.0;
    int n = 0;
    for (int l = 0; l < c.num_subbands; ++l) {
      for (int m = 0; m < c.num_bs; ++m) {
        CHECK(est.channels.uplink(l, m) == again.channels.uplink(l, m));
        const Eigen::MatrixXcd& h = s.channels.uplink(l, m);
        const Eigen::MatrixXcd& e = est.channels.uplink(l, m);
        for (Eigen::Index i = 0; i < h.size(); ++i) {
          const std::complex<double> r = e(i) / h(i) - 1.0;
          acc += std::norm(r);
          mean_re += r.real();
          ++n;
        }
      }
      for (int i = 0; i < c.num_vehicles; ++i) {
        CHECK(est.channels.cross(l)(i, i) == 0.0);
        for (int k = 0; k < c.num_vehicles; ++k) {
          if (i == k) continue;
          const std::complex<double> r = est.channels.cross(l)(i, k) / s.channels.cross(l)(i, k) - 1.0;
          acc += std::norm(r);
          mean_re += r.real();
          ++n;
        }
      }
    }
    // 12 * 11 * 3 + 4 * 12 * 2 * 3 = 684 coefficients: 4-sigma bounds on the sample moments.
    CHECK(acc / n == doctest::Approx(0.04).epsilon(4.0 / std::sqrt(n)));
    CHECK(std::abs(mean_re / n) <= 4.0 * std::sqrt(0.02 / n));
    CHECK(est.channels.sensing_amp_min == s.channels.sensing_amp_min);
    CHECK(est.task_bits == s.task_bits);
  }
}
