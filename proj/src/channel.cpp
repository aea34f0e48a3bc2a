// SPDX-License-Identifier: Apache-2.0

#include "beamsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beamsim
{

NetworkLayout NetworkLayout::hexagonal(double isd_m, int rings, double antenna_height_m)
{
    if (!(isd_m > 0.0) || rings < 0 || !(antenna_height_m > 0.0))
        throw std::invalid_argument("NetworkLayout: bad geometry parameters");
    NetworkLayout layout;
    layout.isd_m = isd_m;
    layout.antenna_height_m = antenna_height_m;

    const double pi = std::numbers::pi;
    const Vec2 e1{isd_m * std::cos(pi / 6), isd_m * std::sin(pi / 6)};
    const Vec2 e2{0.0, isd_m};
    layout.sites.push_back({0.0, 0.0});
    // Ring by ring so site ids grow with distance.
    for (int ring = 1; ring <= rings; ++ring)
        for (int q = -ring; q <= ring; ++q)
            for (int r = -ring; r <= ring; ++r)
            {
                const int s = -q - r;
                if (std::max({std::abs(q), std::abs(r), std::abs(s)}) != ring)
                    continue;
                layout.sites.push_back({q * e1.x + r * e2.x, q * e1.y + r * e2.y});
            }

    int id = 0;
    for (std::size_t site = 0; site < layout.sites.size(); ++site)
        for (int k = 0; k < 3; ++k)
        {
            layout.sectors.push_back({id, static_cast<int>(site), layout.sites[site], 2.0 * pi * k / 3.0});
            if (id != layout.serving)
                layout.interferers.push_back(id);
            ++id;
        }
    return layout;
}

double NetworkLayout::cell_radius() const
{
    return isd_m / std::sqrt(3.0);
}

bool NetworkLayout::covers(Vec2 p) const
{
    // Inside the union of hexagonal cells, each with flat-to-flat width isd_m.
    // Cell edges are perpendicular to the neighbour bearings 30 + 60k degrees.
    for (const auto &s : sites)
    {
        const double dx = p.x - s.x, dy = p.y - s.y;
        bool inside = true;
        for (int k = 0; k < 6 && inside; ++k)
        {
            const double a = std::numbers::pi / 6 + k * std::numbers::pi / 3;
            inside = dx * std::cos(a) + dy * std::sin(a) <= 0.5 * isd_m * (1.0 + 1e-12);
        }
        if (inside)
            return true;
    }
    return false;
}

void RadioConfig::validate() const
{
    if (!(carrier_ghz > 0.0) || !(bandwidth_hz > 0.0) || !(tx_power_w > 0.0) || !(efficiency > 0.0) ||
        !(se_cap > 0.0))
        throw std::invalid_argument("RadioConfig: all parameters must be positive");
}

double RadioConfig::noise_w() const
{
    return from_db(noise_dbm_per_hz - 30.0) * bandwidth_hz;
}

double LinkState::channel_gain() const
{
    return from_db(-pathloss_db + shadowing_db) * fading_power;
}

double pathloss_db(double distance_km)
{
    if (!(distance_km > 0.0))
        throw std::invalid_argument("pathloss_db: distance must be positive");
    return 128.1 + 37.6 * std::log10(std::max(distance_km, 0.01));
}

double draw_fading(double m_shape, std::mt19937_64 &rng)
{
    if (std::isinf(m_shape) && m_shape > 0)
        return 1.0;
    if (!(m_shape >= 1.0))
        throw std::invalid_argument("draw_fading: Nakagami shape must be >= 1");
    std::gamma_distribution<double> gamma(m_shape, 1.0 / m_shape);
    return gamma(rng);
}

double draw_shadowing_db(double sigma_db, std::mt19937_64 &rng)
{
    if (sigma_db == 0.0)
        return 0.0;
    std::normal_distribution<double> normal(0.0, sigma_db);
    return normal(rng);
}

double rate_bps(double sinr_linear, const RadioConfig &radio)
{
    if (!(sinr_linear >= 0.0))
        throw std::invalid_argument("rate_bps: SINR must be non-negative");
    const double shannon = radio.efficiency * radio.bandwidth_hz * std::log2(1.0 + sinr_linear);
    return std::min(shannon, radio.se_cap * radio.bandwidth_hz);
}

double sinr_from_powers(double serving_w, double serving_fading, std::span<const double> interferer_w,
                        std::span<const double> interferer_fading, double noise_w)
{
    if (interferer_w.size() != interferer_fading.size())
        throw std::invalid_argument("sinr_from_powers: size mismatch");
    double interference = 0.0;
    for (std::size_t i = 0; i < interferer_w.size(); ++i)
        interference += interferer_w[i] * interferer_fading[i];
    const double denom = interference + noise_w;
    if (denom <= 0.0)
        return serving_w > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return serving_w * serving_fading / denom;
}

double sinr(Vec2 user, const BeamGain &beam, const BeamGain &interferer_pattern, const NetworkLayout &layout,
            const SectorGeometry &geometry, std::span<const LinkState> link_states, const RadioConfig &radio)
{
    if (link_states.size() < layout.sectors.size())
        throw std::invalid_argument("sinr: missing link states");
    if (!layout.covers(user))
        throw OutOfCoverageError("sinr: user lies outside every sector footprint");
    const Sector &serving = layout.sectors.at(static_cast<std::size_t>(layout.serving));
    const double signal = radio.tx_power_w *
                          beam.linear(geometry.direction_to(serving.position, serving.azimuth_rad, user)) *
                          link_states[static_cast<std::size_t>(serving.id)].channel_gain();
    double interference = 0.0;
    for (int id : layout.interferers)
    {
        const Sector &s = layout.sectors.at(static_cast<std::size_t>(id));
        interference += radio.tx_power_w *
                        interferer_pattern.linear(geometry.direction_to(s.position, s.azimuth_rad, user)) *
                        link_states[static_cast<std::size_t>(id)].channel_gain();
    }
    return signal / (interference + radio.noise_w());
}

} // namespace beamsim
