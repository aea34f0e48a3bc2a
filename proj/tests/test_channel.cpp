// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "beamsim/channel.hpp"
#include "beamsim/random.hpp"

#include <cmath>
#include <numbers>

using namespace beamsim;

TEST_CASE("path loss examples")
{
    CHECK(pathloss_db(1.0) == doctest::Approx(128.1));
    CHECK(pathloss_db(0.1) == doctest::Approx(90.5));
    CHECK(pathloss_db(0.5) == doctest::Approx(128.1 + 37.6 * std::log10(0.5)));
    // Clamped at 10 m.
    CHECK(pathloss_db(0.001) == doctest::Approx(pathloss_db(0.01)));
}

TEST_CASE("rate map")
{
    const RadioConfig radio;
    CHECK(rate_bps(0.0, radio) == 0.0);
    CHECK(rate_bps(1.0, radio) == doctest::Approx(0.75 * 10e6));
    CHECK(rate_bps(15.0, radio) == doctest::Approx(0.75 * 10e6 * 4.0));
    // 0.75 log2(1 + S) reaches 4.8 at S = 2^6.4 - 1.
    CHECK(rate_bps(1e6, radio) == doctest::Approx(4.8 * 10e6));
    CHECK(rate_bps(std::pow(2.0, 6.4) - 1.0, radio) == doctest::Approx(4.8 * 10e6));
}

TEST_CASE("noise power")
{
    const RadioConfig radio;
    CHECK(10 * std::log10(radio.noise_w() * 1e3) == doctest::Approx(-104.0));
    RadioConfig bad;
    bad.bandwidth_hz = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Nakagami power samples have unit mean and variance 1/m")
{
    for (double m : {1.0, 2.0, 5.0, 10.0})
    {
        auto rng = make_stream(5, kTestStream, static_cast<std::uint64_t>(m));
        const int n = 400000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i)
        {
            const double x = draw_fading(m, rng);
            s += x;
            s2 += x * x;
        }
        const double mean = s / n, var = s2 / n - mean * mean;
        CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
        CHECK(var == doctest::Approx(1.0 / m).epsilon(0.03));
    }
}

TEST_CASE("m = 1 is Rayleigh: exponential power")
{
    auto rng = make_stream(6, kTestStream, 0);
    const int n = 200000;
    int above = 0;
    for (int i = 0; i < n; ++i)
        above += draw_fading(1.0, rng) > 1.0;
    CHECK(static_cast<double>(above) / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("no fading and invalid shapes")
{
    auto rng = make_stream(1, kTestStream, 1);
    CHECK(draw_fading(kNoFading, rng) == 1.0);
    CHECK_THROWS_AS(draw_fading(0.5, rng), std::invalid_argument);
}

TEST_CASE("shadowing standard deviation")
{
    auto rng = make_stream(9, kTestStream, 2);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i)
    {
        const double x = draw_shadowing_db(6.0, rng);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::sqrt(s2 / n - mean * mean) == doctest::Approx(6.0).epsilon(0.03));
    CHECK(draw_shadowing_db(0.0, rng) == 0.0);
}

TEST_CASE("hexagonal layout")
{
    const NetworkLayout layout = NetworkLayout::hexagonal(500.0);
    CHECK(layout.sites.size() == 19);
    CHECK(layout.sectors.size() == 57);
    CHECK(layout.interferers.size() == 56);
    CHECK(layout.cell_radius() == doctest::Approx(500.0 / std::sqrt(3.0)));
    int nearest = 0;
    for (const auto &s : layout.sites)
    {
        const double d = norm(s);
        if (d > 1.0 && d < 501.0)
        {
            ++nearest;
            CHECK(d == doctest::Approx(500.0));
            // Neighbours at bearings 30 + 60k degrees.
            const double deg = std::atan2(s.y, s.x) * 180.0 / std::numbers::pi;
            const double off = std::fmod(deg - 30.0 + 360.0, 60.0);
            CHECK((off < 1e-6 || off > 60.0 - 1e-6));
        }
    }
    CHECK(nearest == 6);
    CHECK(layout.sectors[0].azimuth_rad == 0.0);
    CHECK(layout.covers({100.0, 0.0}));
    CHECK_FALSE(layout.covers({5000.0, 0.0}));
    CHECK(NetworkLayout::hexagonal(500.0, 0).sectors.size() == 3);
}

TEST_CASE("SINR from received powers")
{
    const std::vector<double> interferers{1e-12, 2e-12}, fading{1.0, 0.5};
    CHECK(sinr_from_powers(4e-12, 1.0, interferers, fading, 1e-12) == doctest::Approx(4e-12 / 3e-12));
    CHECK(sinr_from_powers(4e-12, 0.5, {}, {}, 1e-12) == doctest::Approx(2.0));
}

TEST_CASE("link budget of an isolated beam")
{
    // A lone site: the co-sited sectors point 120 degrees away and radiate
    // nothing across their reflectors, so SINR equals SNR.
    const NetworkLayout layout = NetworkLayout::hexagonal(500.0, 0);
    SectorGeometry geometry;
    geometry.region.radius_m = 500.0 / std::sqrt(3.0);
    const RadioConfig radio;
    const BeamGain beam(ArrayDesign{12, 32, 0.4375, 0.7, 0.187, 0.174}, SteeringAngles{1.72, 0.0});

    const Vec2 user{200.0, 0.0};
    const double d_km = geometry.distance_3d({0, 0}, user) / 1000.0;
    std::vector<LinkState> links(layout.sectors.size());
    for (auto &l : links)
        l.pathloss_db = pathloss_db(d_km);

    const Direction dir = geometry.direction_to(user);
    const double expected_db = 10 * std::log10(40.0 * 1e3) + to_db(beam.linear(dir)) - pathloss_db(d_km) + 104.0;
    const double got = sinr(user, beam, beam, layout, geometry, links, radio);
    CHECK(to_db(got) == doctest::Approx(expected_db).epsilon(1e-9));

    // Shadowing (a gain in dB) and fading scale the serving link.
    links[0].shadowing_db = 3.0;
    links[0].fading_power = 0.5;
    CHECK(to_db(sinr(user, beam, beam, layout, geometry, links, radio)) ==
          doctest::Approx(expected_db + 3.0 + to_db(0.5)).epsilon(1e-9));

    CHECK_THROWS_AS(sinr({5000.0, 0.0}, beam, beam, layout, geometry, links, radio), OutOfCoverageError);
}

TEST_CASE("interference lowers SINR in the full layout")
{
    const NetworkLayout full = NetworkLayout::hexagonal(500.0);
    const NetworkLayout lone = NetworkLayout::hexagonal(500.0, 0);
    SectorGeometry geometry;
    const RadioConfig radio;
    const BeamGain beam(ArrayDesign{2, 4, 0.4375, 0.7, 0.187, 0.174}, SteeringAngles{1.72, 0.0});
    const Vec2 user{250.0, 50.0};
    auto links_for = [&](const NetworkLayout &layout) {
        std::vector<LinkState> links(layout.sectors.size());
        for (const auto &s : layout.sectors)
            links[static_cast<std::size_t>(s.id)].pathloss_db =
                pathloss_db(geometry.distance_3d(s.position, user) / 1000.0);
        return links;
    };
    const double with = sinr(user, beam, beam, full, geometry, links_for(full), radio);
    const double without = sinr(user, beam, beam, lone, geometry, links_for(lone), radio);
    CHECK(with < without);
}

TEST_CASE("sector wedge geometry")
{
    SectorGeometry g;
    g.region.radius_m = 300.0;
    CHECK(g.region.contains({100.0, 0.0}));
    CHECK(g.region.contains({100.0, 170.0}));   // 59.5 degrees off boresight
    CHECK_FALSE(g.region.contains({100.0, 175.0}));
    CHECK_FALSE(g.region.contains({-10.0, 0.0}));
    CHECK_FALSE(g.region.contains({301.0, 0.0}));
    CHECK(g.region.area_m2() == doctest::Approx(std::numbers::pi / 3 * 300.0 * 300.0));

    const Direction down = g.direction_to({28.5, 0.0});
    CHECK(down.theta == doctest::Approx(0.75 * std::numbers::pi));
    CHECK(down.phi == doctest::Approx(0.0));
    CHECK(g.range_at_depression(g.depression(150.0)) == doctest::Approx(150.0));
    // A mast at (500, 0) looking back towards the origin sees the origin on boresight.
    CHECK(g.direction_to({500.0, 0.0}, std::numbers::pi, {0.0, 0.0}).phi == doctest::Approx(0.0).epsilon(1e-12));
}
