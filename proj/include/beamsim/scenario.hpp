// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration: one JSON document per scenario. A document may start
// from a named preset ("preset": "mass_event" or "rural") and override any
// field; unknown fields are rejected. Angles are radians, powers dBm.

#pragma once

#include "beamsim/codebook.hpp"
#include "beamsim/io.hpp"
#include "beamsim/netsim.hpp"
#include "beamsim/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsim
{

class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct HotspotConfig
{
    double range_m = 200.0;
    double bearing_rad = 0.0;
    double sigma_m = 80.0;
    double peak = 30.0;
};

struct ScenarioConfig
{
    std::string name = "custom";
    DesignSpace space;
    SearchSettings search;
    std::vector<LevelSpec> levels;
    CodebookOptions codebook;
    double isd_m = 500.0;
    int rings = 2;
    double antenna_height_m = 30.0;
    double user_height_m = 1.5;
    double cell_radius_m = 0.0;  // 0 means isd / sqrt(3)
    double uniform_intensity = 1.0;
    std::optional<HotspotConfig> hotspot;
    double mean_file_bits = 4e6;
    RadioConfig radio;
    double tx_power_dbm = 46.02059991327962;
    SimSettings sim;
    std::vector<double> m_shapes{kNoFading};
    std::string campaign = "on_off";  // or "level_sweep"
    int replications = 1;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // Throws ConfigError on any inconsistency.
    void validate() const;

    std::vector<SubarraySize> optimized_sizes() const;  // levels 1..L, or level 0 alone
    SectorGeometry geometry() const;
    NetworkLayout layout() const;
    TrafficModel traffic() const;
    std::vector<std::uint64_t> seeds() const;
};

ScenarioConfig preset(const std::string &name);

// Strict parse of a full or partial document (partial documents need "preset").
ScenarioConfig config_from_json(const Json &j);
Json config_to_json(const ScenarioConfig &config);
ScenarioConfig load_config(const std::filesystem::path &path);

} // namespace beamsim
