// SPDX-License-Identifier: Apache-2.0
//
// Slotted downlink simulation of one beamformed sector. Sessions arrive as a
// spatial Poisson process, download one file each under proportional-fair
// scheduling and leave. The served user runs one beam-selection step per
// scheduled slot; interfering sectors transmit continuously.

#pragma once

#include "beamsim/channel.hpp"
#include "beamsim/codebook.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace beamsim
{

class UnstableError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Hotspot
{
    Vec2 center;
    double sigma_m = 80.0;
    double peak = 30.0;  // users/s/km^2 at the center
};

struct TrafficModel
{
    double uniform = 1.0;  // users/s/km^2
    std::optional<Hotspot> hotspot;
    double mean_file_bits = 4e6;

    void validate() const;
    double intensity(Vec2 p) const;  // users/s/km^2
    double max_intensity() const;
    // Expected arrivals per second inside the region (midpoint quadrature).
    double arrival_rate(const SectorRegion &region, int grid = 400) const;
};

struct Arrival
{
    double time = 0.0;
    Vec2 position;
};

// Inhomogeneous spatial Poisson arrivals over [0, duration) by thinning a
// homogeneous process on the region's bounding box. Sorted by time.
std::vector<Arrival> draw_arrivals(const TrafficModel &traffic, double duration, const SectorRegion &region,
                                   std::mt19937_64 &rng);

// P0 + 9.4 P busy_fraction
double power_consumption(double busy_fraction, double tx_power_w);

constexpr double kIdlePowerW = 260.0;
constexpr double kPowerSlope = 9.4;

struct SimSettings
{
    double horizon_s = 1000.0;
    double warmup_fraction = 0.1;
    double slot_s = 1e-3;
    double pf_window_slots = 100.0;
    double m_shape = kNoFading;
    double shadowing_db = 6.0;
    int level_cap = -1;  // deepest level the search may reach; 0 disables beamforming
    std::size_t max_users = 500;
    // Sessions whose strongest level-0 signal (shadowing included) comes from
    // another sector are served there and leave this simulation.
    bool best_server_attachment = true;

    void validate() const;
};

// Everything the simulator needs about the radio side of the cell.
struct CellModel
{
    const Codebook *codebook = nullptr;
    NetworkLayout layout;
    RadioConfig radio;
};

struct SessionRecord
{
    std::uint64_t id = 0;
    double arrival_s = 0.0;
    Vec2 position;
    std::uint64_t file_bits = 0;
    double sojourn_s = 0.0;
    double throughput_bps = 0.0;
    int final_beam = 0;
    int probes = 0;
};

struct KpiReport
{
    double mut_bps = 0.0;
    double cet_bps = 0.0;
    double pc_w = kIdlePowerW;
    double busy_fraction = 0.0;
    std::uint64_t sessions_arrived = 0;    // after warmup, attached to this sector
    std::uint64_t sessions_handed_off = 0;  // after warmup, attached elsewhere
    std::uint64_t sessions_completed = 0;  // after warmup, before the horizon
    double offered_load_bps = 0.0;
    double estimated_utilization = 0.0;  // level-0 beam, mean channel
    std::vector<std::uint64_t> beam_histogram;  // served slots per beam id
    double mean_probes = 0.0;
    int max_probes = 0;
    double measured_time_s = 0.0;
    std::vector<SessionRecord> sessions;
};

// One-step PF decision among users whose instantaneous rates are known.
// Returns the index maximizing rate / average; ties go to the lowest index.
std::size_t pf_pick(const std::vector<double> &rates, const std::vector<double> &averages);

struct UserSession
{
    std::uint64_t id = 0;
    Vec2 position;
    double arrival_s = 0.0;
    std::uint64_t file_bits = 0;
    std::uint64_t remaining_bits = 0;
    double pf_avg_bps = 1.0;
    int best_beam = 0;
    std::optional<int> cursor;
    int probes = 0;
    std::vector<double> beam_rx_w;        // serving sector, per beam, before fading
    std::vector<double> interferer_rx_w;  // per interfering sector, before fading
    std::mt19937_64 fading_rng;
};

struct SlotOutcome
{
    std::optional<std::uint64_t> user;  // empty when nobody is active
    int beam = -1;
    double sinr = 0.0;
    double rate_bps = 0.0;
    std::uint64_t delivered_bits = 0;
    double busy_s = 0.0;
    int probes = 0;
    bool completed = false;
};

class Simulator
{
public:
    Simulator(const CellModel &cell, const SimSettings &settings, std::uint64_t seed);

    // Adds a session. Its shadowing and fading come from random streams keyed
    // by the session id. Returns nullptr when the session attaches to another
    // sector. Throws UnstableError past max_users.
    const UserSession *admit(std::uint64_t id, const Arrival &arrival, std::uint64_t file_bits);

    // Serves one slot starting at now() and advances the clock by slot_s.
    SlotOutcome schedule_slot();

    double now() const { return static_cast<double>(slot_) * settings_.slot_s; }
    // Jumps to the first slot boundary at or after t (never backwards).
    void skip_to(double t);

    const std::vector<UserSession> &active() const { return active_; }
    // Sessions finished since the last call.
    std::vector<SessionRecord> take_completed();

    // Instantaneous SINR of a beam for an active user under the fading drawn
    // for the current slot.
    double beam_sinr(const UserSession &user, int beam_id, double serving_fading, double interference_w) const;

private:
    const CellModel &cell_;
    SimSettings settings_;
    std::uint64_t seed_;
    std::int64_t slot_ = 0;
    double noise_w_ = 0.0;
    std::vector<UserSession> active_;
    std::vector<SessionRecord> completed_;
};

KpiReport run(const CellModel &cell, const TrafficModel &traffic, const SimSettings &settings, std::uint64_t seed);

// Independent runs pooled into one report: sessions are merged before MUT and
// CET are taken, PC and busy fraction are averaged, histograms are summed.
KpiReport run_replications(const CellModel &cell, const TrafficModel &traffic, const SimSettings &settings,
                           const std::vector<std::uint64_t> &seeds);

// Pools finished reports in the given order.
KpiReport pool_reports(const std::vector<KpiReport> &reports);

// Linear-interpolated percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

} // namespace beamsim
