#include "iscc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

namespace iscc {
namespace {

enum class Unit { None, Watt, Ratio };

using Field = std::variant<int SystemConfig::*, double SystemConfig::*, std::uint64_t SystemConfig::*>;

struct KeySpec {
  const char* name;
  Field field;
  Unit unit;
};

// Order here defines the order of to_text().
const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"num_antennas", &SystemConfig::num_antennas, Unit::None},
      {"num_bs", &SystemConfig::num_bs, Unit::None},
      {"num_vehicles", &SystemConfig::num_vehicles, Unit::None},
      {"num_subbands", &SystemConfig::num_subbands, Unit::None},
      {"subband_bandwidth", &SystemConfig::subband_bandwidth, Unit::None},
      {"noise_power_bs", &SystemConfig::noise_power_bs, Unit::Watt},
      {"noise_power_radar", &SystemConfig::noise_power_radar, Unit::Watt},
      {"ref_pathloss", &SystemConfig::ref_pathloss, Unit::Ratio},
      {"v2v_pathloss_exponent", &SystemConfig::v2v_pathloss_exponent, Unit::None},
      {"max_power", &SystemConfig::max_power, Unit::Watt},
      {"max_local_cpu", &SystemConfig::max_local_cpu, Unit::None},
      {"mec_capacity", &SystemConfig::mec_capacity, Unit::None},
      {"power_coeff", &SystemConfig::power_coeff, Unit::None},
      {"local_intensity", &SystemConfig::local_intensity, Unit::None},
      {"mec_intensity", &SystemConfig::mec_intensity, Unit::None},
      {"offload_ratio", &SystemConfig::offload_ratio, Unit::None},
      {"radar_const", &SystemConfig::radar_const, Unit::None},
      {"sample_rate", &SystemConfig::sample_rate, Unit::None},
      {"quant_bits", &SystemConfig::quant_bits, Unit::None},
      {"accum_symbols", &SystemConfig::accum_symbols, Unit::None},
      {"sinr_threshold", &SystemConfig::sinr_threshold, Unit::Ratio},
      {"min_detect_dist", &SystemConfig::min_detect_dist, Unit::None},
      {"false_alarm", &SystemConfig::false_alarm, Unit::None},
      {"tx_gain", &SystemConfig::tx_gain, Unit::Ratio},
      {"rx_aperture", &SystemConfig::rx_aperture, Unit::None},
      {"rcs_lo", &SystemConfig::rcs_lo, Unit::None},
      {"rcs_hi", &SystemConfig::rcs_hi, Unit::None},
      {"target_distance", &SystemConfig::target_distance, Unit::None},
      {"csi_error", &SystemConfig::csi_error, Unit::None},
      {"beam_width", &SystemConfig::beam_width, Unit::None},
      {"sca_tol", &SystemConfig::sca_tol, Unit::None},
      {"outer_tol", &SystemConfig::outer_tol, Unit::None},
      {"max_outer_iters", &SystemConfig::max_outer_iters, Unit::None},
      {"rng_seed", &SystemConfig::rng_seed, Unit::None},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

double parse_double(std::string_view key, std::string_view text) {
  // strtod accepts every form to_text() emits, including exponents.
  const std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw ConfigError("malformed value for '" + std::string(key) + "': '" + buf + "'");
  }
  return v;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("malformed integer for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SystemConfig paper_profile() { return SystemConfig{}; }

SystemConfig desk_profile() {
  SystemConfig c;
  c.num_vehicles = 12;
  c.num_bs = 2;
  c.num_subbands = 3;
  return c;
}

std::vector<std::string> validate(const SystemConfig& c) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  require(c.num_antennas >= 1, "num_antennas must be >= 1");
  require(c.num_bs >= 1 && c.num_bs <= 4, "num_bs must be in [1, 4]");
  require(c.num_vehicles >= 1, "num_vehicles must be >= 1");
  require(c.num_subbands >= 1, "num_subbands must be >= 1");
  if (c.num_bs >= 1 && c.num_subbands >= 1) {
    // Every BS must serve more vehicles than there are sub-bands.
    require(static_cast<double>(c.num_subbands) < static_cast<double>(c.num_vehicles) / c.num_bs,
            "num_subbands must be < num_vehicles / num_bs");
  }
  const std::pair<const char*, double> positives[] = {
      {"subband_bandwidth", c.subband_bandwidth}, {"noise_power_bs", c.noise_power_bs},
      {"noise_power_radar", c.noise_power_radar}, {"ref_pathloss", c.ref_pathloss},
      {"v2v_pathloss_exponent", c.v2v_pathloss_exponent},
      {"max_power", c.max_power}, {"max_local_cpu", c.max_local_cpu},
      {"mec_capacity", c.mec_capacity}, {"power_coeff", c.power_coeff},
      {"local_intensity", c.local_intensity}, {"mec_intensity", c.mec_intensity},
      {"radar_const", c.radar_const}, {"sample_rate", c.sample_rate},
      {"quant_bits", c.quant_bits}, {"min_detect_dist", c.min_detect_dist},
      {"tx_gain", c.tx_gain}, {"rx_aperture", c.rx_aperture}, {"rcs_lo", c.rcs_lo},
      {"sca_tol", c.sca_tol}, {"outer_tol", c.outer_tol},
  };
  for (const auto& [name, v] : positives) require(v > 0.0, std::string(name) + " must be > 0");
  require(c.offload_ratio > 0.0 && c.offload_ratio <= 1.0, "offload_ratio must be in (0, 1]");
  require(c.false_alarm > 0.0 && c.false_alarm < 1.0, "false_alarm must be in (0, 1)");
  require(c.sinr_threshold >= 0.0, "sinr_threshold must be >= 0");
  require(c.rcs_hi >= c.rcs_lo, "rcs_hi must be >= rcs_lo");
  require(c.csi_error >= 0.0, "csi_error must be >= 0");
  require(c.accum_symbols >= 1, "accum_symbols must be >= 1");
  require(c.beam_width >= 1, "beam_width must be >= 1");
  require(c.max_outer_iters >= 1, "max_outer_iters must be >= 1");
  return errors;
}

void apply_setting(SystemConfig& config, std::string_view raw_key, std::string_view raw_value) {
  const std::string_view key = trim(raw_key);
  const std::string_view value = trim(raw_value);

  std::string_view base = key;
  Unit suffix = Unit::None;
  if (ends_with(key, "_dbm")) {
    base = key.substr(0, key.size() - 4);
    suffix = Unit::Watt;
  } else if (ends_with(key, "_db")) {
    base = key.substr(0, key.size() - 3);
    suffix = Unit::Ratio;
  }

  for (const auto& spec : key_table()) {
    if (spec.name == key) {
      std::visit(
          [&](auto member) {
            using T = std::remove_cvref_t<decltype(config.*member)>;
            if constexpr (std::is_same_v<T, double>) {
              config.*member = parse_double(key, value);
            } else {
              config.*member = parse_integer<T>(key, value);
            }
          },
          spec.field);
      return;
    }
    if (suffix != Unit::None && spec.name == base) {
      if (spec.unit != suffix) {
        throw ConfigError("key '" + std::string(key) + "' has the wrong unit suffix");
      }
      auto* member = std::get_if<double SystemConfig::*>(&spec.field);
      const double db = parse_double(key, value);
      config.**member = suffix == Unit::Watt ? std::pow(10.0, (db - 30.0) / 10.0)
                                             : std::pow(10.0, db / 10.0);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

SystemConfig parse_config(std::istream& in, SystemConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

SystemConfig load_config(const std::string& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, base);
}

std::string to_text(const SystemConfig& config) {
  std::ostringstream out;
  for (const auto& spec : key_table()) {
    out << spec.name << " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(config.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            out << format_double(config.*member);
          } else {
            out << config.*member;
          }
        },
        spec.field);
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& spec : key_table()) keys.emplace_back(spec.name);
  return keys;
}

}  // namespace iscc
