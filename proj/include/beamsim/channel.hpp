// SPDX-License-Identifier: Apache-2.0
//
// Downlink link model of the beamformed sector and its macro neighbours:
// distance-based path loss, log-normal shadowing, Nakagami-m power fading and
// a capped Shannon rate map.

#pragma once

#include "beamsim/antenna.hpp"
#include "beamsim/geometry.hpp"

#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace beamsim
{

class OutOfCoverageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Sector
{
    int id = 0;
    int site = 0;
    Vec2 position;
    double azimuth_rad = 0.0;  // boresight, counter-clockwise from +x
};

// Hexagonal trisector network in the frame of the beamformed site (origin) and
// its beamformed sector (boresight +x). First-ring neighbours sit at bearings
// 30 + 60k degrees, so every sector boresight points between two neighbours.
struct NetworkLayout
{
    double isd_m = 500.0;
    double antenna_height_m = 30.0;
    std::vector<Vec2> sites;
    std::vector<Sector> sectors;
    int serving = 0;
    std::vector<int> interferers;

    static NetworkLayout hexagonal(double isd_m, int rings = 2, double antenna_height_m = 30.0);

    // Circumradius of a site's hexagonal cell.
    double cell_radius() const;
    // True when the point lies inside the hexagonal cell of some site.
    bool covers(Vec2 p) const;
};

struct RadioConfig
{
    double carrier_ghz = 2.6;
    double bandwidth_hz = 10e6;
    double noise_dbm_per_hz = -174.0;
    double tx_power_w = 40.0;
    double efficiency = 0.75;
    double se_cap = 4.8;  // bit/s/Hz

    void validate() const;
    double noise_w() const;
};

struct LinkState
{
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;  // added to the link gain
    double fading_power = 1.0;
    double m_shape = std::numeric_limits<double>::infinity();

    // Linear power gain of the propagation path, fading included.
    double channel_gain() const;
};

constexpr double kNoFading = std::numeric_limits<double>::infinity();

// 128.1 + 37.6 log10(d), d in km, clamped below at 10 m.
double pathloss_db(double distance_km);

// Nakagami-m power sample: Gamma(m, 1/m). m = infinity returns exactly 1.
// Throws std::invalid_argument for m < 1.
double draw_fading(double m_shape, std::mt19937_64 &rng);

double draw_shadowing_db(double sigma_db, std::mt19937_64 &rng);

// min(eff * BW * log2(1 + S), cap * BW)
double rate_bps(double sinr_linear, const RadioConfig &radio);

// Received powers in watts before fading. serving_w is the serving beam's
// contribution, interferer_w[i] the i-th interferer's; fading[i] multiplies
// interferer_w[i]. Shared by the geometric sinr() and the simulator.
double sinr_from_powers(double serving_w, double serving_fading, std::span<const double> interferer_w,
                        std::span<const double> interferer_fading, double noise_w);

// SINR of a user served by `beam` from the layout's serving sector. link_states
// is indexed by sector id; interferers radiate interferer_pattern.
double sinr(Vec2 user, const BeamGain &beam, const BeamGain &interferer_pattern, const NetworkLayout &layout,
            const SectorGeometry &geometry, std::span<const LinkState> link_states, const RadioConfig &radio);

} // namespace beamsim
