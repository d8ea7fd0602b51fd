#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace iscc {

/// L x K binary sub-band allocation matrix A. Column k holds at most one 1
/// when valid; band(k) caches the row of that 1 (or -1).
class Allocation {
 public:
  Allocation() = default;
  Allocation(int num_subbands, int num_vehicles);

  /// `bands[k]` in [0, L) or -1 for an unassigned vehicle.
  static Allocation from_bands(std::span<const int> bands, int num_subbands);
  /// Takes an arbitrary integer matrix; validity is checked separately.
  static Allocation from_matrix(const Eigen::MatrixXi& a);

  [[nodiscard]] int num_subbands() const { return static_cast<int>(a_.rows()); }
  [[nodiscard]] int num_vehicles() const { return static_cast<int>(a_.cols()); }
  [[nodiscard]] const Eigen::MatrixXi& matrix() const { return a_; }
  [[nodiscard]] int operator()(int l, int k) const { return a_(l, k); }

  [[nodiscard]] int band(int k) const { return band_[k]; }
  [[nodiscard]] const std::vector<int>& bands() const { return band_; }

  void assign(int k, int l);
  void clear(int k);

  /// Entries binary and every column sum <= 1.
  [[nodiscard]] bool valid() const;
  /// Valid and every column sum == 1.
  [[nodiscard]] bool complete() const;

  friend bool operator==(const Allocation& a, const Allocation& b) { return a.a_ == b.a_; }

 private:
  Eigen::MatrixXi a_;
  std::vector<int> band_;
};

/// Transmit powers, local CPU frequencies, MEC CPU shares and receive beamformers.
struct ResourceDecision {
  Eigen::VectorXd tx_power;      // p_k (W)
  Eigen::VectorXd local_cpu;     // f_L,k (cycles/s)
  Eigen::VectorXd mec_cpu;       // f_m,k (cycles/s)
  Eigen::MatrixXcd beamformers;  // N x K, column k is u_k

  [[nodiscard]] int num_vehicles() const { return static_cast<int>(tx_power.size()); }
};

}  // namespace iscc
