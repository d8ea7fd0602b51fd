#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iscc {

/// Scenario constants for one ISCC V2X network. All quantities are linear
/// SI units (W, Hz, cycles/s, m); dB inputs are converted at parse time.
struct SystemConfig {
  int num_antennas = 4;
  int num_bs = 4;
  int num_vehicles = 48;
  int num_subbands = 5;

  double subband_bandwidth = 10e6;   // Hz
  double noise_power_bs = 1e-13;     // W (-100 dBm)
  double noise_power_radar = 1e-13;  // W
  double ref_pathloss = 1e-3;        // -30 dB at 1 m
  double v2v_pathloss_exponent = 4.0;

  double max_power = 1.0;         // W (30 dBm)
  double max_local_cpu = 1e9;     // cycles/s
  double mec_capacity = 30e9;     // cycles/s per BS
  double power_coeff = 1e-26;     // W s^3 / cycles^3
  double local_intensity = 50.0;  // cycles/bit
  double mec_intensity = 400.0;   // cycles/bit
  double offload_ratio = 0.1;

  // Task volume b = radar_const * sample_rate * quant_bits.
  double radar_const = 1.0;
  double sample_rate = 125e3;
  double quant_bits = 8.0;

  int accum_symbols = 500;
  double sinr_threshold = 100.0;  // 20 dB
  double min_detect_dist = 40.0;  // m
  double false_alarm = 1e-4;
  double tx_gain = 1.0;
  double rx_aperture = 1.0;  // m^2
  double rcs_lo = 0.8;       // m^2
  double rcs_hi = 1.0;

  // Fixed sensing-target distance for every vehicle; <= 0 draws it per vehicle.
  double target_distance = 0.0;

  // Normalized CSI error variance: schemes optimize on h (1 + e), e ~ CN(0, csi_error),
  // and are scored on the true channels. 0 = perfect CSI.
  double csi_error = 0.0;

  int beam_width = 16;
  double sca_tol = 1e-5;
  double outer_tol = 1e-3;
  int max_outer_iters = 20;
  std::uint64_t rng_seed = 1;

  [[nodiscard]] double task_bits() const { return radar_const * sample_rate * quant_bits; }
};

/// Full-scale network parameters.
SystemConfig paper_profile();
/// Reduced network (K=12, M=2, L=3) that runs a sweep in minutes on one core.
SystemConfig desk_profile();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every violated invariant, one message each; empty when the config is valid.
std::vector<std::string> validate(const SystemConfig& config);

/// Applies one `key = value` pair. Keys ending in `_dbm` / `_db` are converted
/// to linear units. Throws ConfigError on unknown keys or malformed values.
void apply_setting(SystemConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines (with `#` comments) on top of `base`.
SystemConfig parse_config(std::istream& in, SystemConfig base = {});
SystemConfig load_config(const std::string& path, SystemConfig base = {});

/// Canonical text form, one `key = value` line per field in linear units.
/// parse_config(to_text(c)) reproduces c exactly.
std::string to_text(const SystemConfig& config);

std::vector<std::string> config_keys();

}  // namespace iscc
