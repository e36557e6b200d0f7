#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "geocloud/simulator.hpp"

namespace geocloud {

/// A self-describing run configuration: one scenario plus where to write.
struct Config {
  Scenario scenario;
  std::filesystem::path output_dir = "out";
};

/// Schema tag every config file must carry.
inline constexpr std::string_view kConfigSchema = "geocloud.config/1";

/// Desk-scale default: 200 ARM PMs, 200 VMs, 168 hourly steps, CloudSigma
/// perceived-performance pricing, synthetic real-time prices.
Config default_config();

/// Parses a JSON config. Unknown keys are rejected and every cross-reference
/// (architecture profile, pricing preset, trace files) is checked; problems
/// raise ConfigError naming the offending key. Relative trace paths are
/// resolved against `base_dir`.
Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// The config as JSON, in the same schema parse_config reads.
std::string dump_config(const Config& config);

}  // namespace geocloud
