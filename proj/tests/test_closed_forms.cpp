#include <doctest.h>

#include <cmath>
#include <random>

#include "iscc/closed_forms.hpp"
#include "iscc/linalg.hpp"
#include "iscc/metrics.hpp"
#include "iscc/oracles.hpp"
#include "support.hpp"

using namespace iscc;

namespace {

Association one_bs(int K, int M = 1) {
  Association a;
  a.serving_bs.assign(K, 0);
  a.served.assign(M, {});
  for (int k = 0; k < K; ++k) a.served[0].push_back(k);
  return a;
}

double workload(int k, const Eigen::VectorXd& bits, const SystemConfig& c) {
  return c.offload_ratio * bits[k] * c.mec_intensity;
}

}  // namespace

TEST_CASE("MEC split worked examples") {
  SystemConfig c;
  c.mec_capacity = 3e10;
  SUBCASE("equal workloads share equally") {
    const Eigen::VectorXd f = mec_allocate(one_bs(3), Eigen::VectorXd::Constant(3, 1e6), c);
    for (int k = 0; k < 3; ++k) CHECK(f[k] == doctest::Approx(1e10).epsilon(1e-15));
  }
  SUBCASE("workloads 1:2:3") {
    const Eigen::VectorXd f = mec_allocate(one_bs(3), Eigen::Vector3d(1e6, 2e6, 3e6), c);
    CHECK(f[0] == doctest::Approx(5e9).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(10e9).epsilon(1e-14));
    CHECK(f[2] == doctest::Approx(15e9).epsilon(1e-14));
  }
  SUBCASE("a BS without vehicles is skipped") {
    const Eigen::VectorXd f = mec_allocate(one_bs(2, 3), Eigen::VectorXd::Constant(2, 1e6), c);
    CHECK(f[0] == doctest::Approx(1.5e10).epsilon(1e-15));
    CHECK(f[1] == doctest::Approx(1.5e10).epsilon(1e-15));
  }
}

TEST_CASE("MEC split matches a bisection min-max solve and binds capacity") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.2e6, 5e6);
  for (int t = 0; t < 100; ++t) {
    SystemConfig c = desk_profile();
    c.mec_capacity = 1e9 + 1e8 * t;
    const Scenario s = make_scenario(c, 10 + t);
    Eigen::VectorXd bits(c.num_vehicles);
    for (int k = 0; k < c.num_vehicles; ++k) bits[k] = u(rng);
    const Eigen::VectorXd f = mec_allocate(s.association, bits, c);
    for (const auto& served : s.association.served) {
      Eigen::VectorXd w(served.size());
      for (std::size_t i = 0; i < served.size(); ++i) w[i] = workload(served[i], bits, c);
      const Eigen::VectorXd ref = oracles::minmax_share_bisection(w, c.mec_capacity);
      double used = 0.0;
      const double latency0 = w[0] / f[served[0]];
      for (std::size_t i = 0; i < served.size(); ++i) {
        CHECK(std::abs(f[served[i]] - ref[i]) <= 1e-6 * ref[i]);
        CHECK(w[i] / f[served[i]] == doctest::Approx(latency0).epsilon(1e-9));
        used += f[served[i]];
      }
      CHECK(used == c.mec_capacity);
    }
  }
}

TEST_CASE("receive beamformer") {
  std::mt19937_64 rng(2);

  SUBCASE("no interferers gives the matched filter") {
    const Scenario s = test::hand_scenario(3, 3, 4, rng);
    const Allocation a = Allocation::from_bands(std::vector<int>{0, 1, 2}, 3);
    for (int k = 0; k < 3; ++k) {
      const Beamformer b = receive_beamformer(k, a, Eigen::VectorXd::Constant(3, 0.5), s);
      CHECK_FALSE(b.fallback);
      const Eigen::VectorXcd mf = matched_filter(s.channels.uplink(k, 0).col(k));
      CHECK((b.u - mf).norm() <= 1e-12);
    }
  }
  SUBCASE("an interferer orthogonal to h leaves the matched filter") {
    Scenario s = test::hand_scenario(2, 1, 4, rng);
    Eigen::MatrixXcd& H = s.channels.uplink(0, 0);
    H.col(0) << 1e-4, std::complex<double>(0, 2e-4), 0.0, 0.0;
    H.col(1) << 0.0, 0.0, 3e-4, std::complex<double>(1e-4, -1e-4);
    const Allocation a = Allocation::from_bands(std::vector<int>{0, 0}, 1);
    const Beamformer b = receive_beamformer(0, a, Eigen::Vector2d(0.5, 0.9), s);
    CHECK((b.u - matched_filter(H.col(0))).norm() <= 1e-12);
  }
  SUBCASE("unassigned vehicle falls back to the matched filter") {
    const Scenario s = test::hand_scenario(2, 2, 4, rng);
    const Allocation a = Allocation::from_bands(std::vector<int>{-1, 1}, 2);
    const Beamformer b = receive_beamformer(0, a, Eigen::Vector2d(0.5, 0.5), s);
    CHECK(b.fallback);
    CHECK((b.u - matched_filter(s.channels.uplink(0, 0).col(0))).norm() <= 1e-12);
  }
  SUBCASE("beats random search and matches the eigen solution") {
    for (int t = 0; t < 20; ++t) {
      const Scenario s = test::hand_scenario(4, 1, 4, rng, 1e-9, 1e-14);
      const Allocation a = Allocation::from_bands(std::vector<int>{0, 0, 0, 0}, 1);
      const Eigen::VectorXd p = Eigen::Vector4d(0.2, 0.4, 0.6, 0.8);
      const int k = t % 4;
      const Eigen::VectorXcd h = s.channels.uplink(0, 0).col(k);
      const Eigen::MatrixXcd D = interference_plus_noise(k, 0, a, p, s);
      const Beamformer b = receive_beamformer(k, a, p, s);
      CHECK(std::abs(b.u.norm() - 1.0) <= 1e-12);
      const double q = rayleigh_quotient(b.u, h, D);
      CHECK(q >= oracles::max_rayleigh_quotient_random(h, D, 10000, rng));
      CHECK(q == doctest::Approx(oracles::max_rayleigh_quotient_eig(h, D)).epsilon(1e-8));
    }
  }
}

TEST_CASE("optimal combiners never lose rate to matched filters") {
  for (int t = 0; t < 20; ++t) {
    const Scenario s = make_scenario(desk_profile(), 70 + t);
    std::vector<int> bands(12);
    for (int k = 0; k < 12; ++k) bands[k] = (k * 7 + t) % 3;
    const Allocation a = Allocation::from_bands(bands, 3);
    ResourceDecision d = test::uniform_decision(s, 0.5);
    d.beamformers = matched_beamformers(a, s);
    const Eigen::VectorXd mrc = offload_rates(a, d, s);
    d.beamformers = optimal_beamformers(a, d.tx_power, s);
    const Eigen::VectorXd opt = offload_rates(a, d, s);
    for (int k = 0; k < 12; ++k) CHECK(opt[k] >= mrc[k] * (1 - 1e-12));
  }
}
