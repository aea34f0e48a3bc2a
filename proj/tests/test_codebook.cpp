// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"

#include "beamsim/random.hpp"

#include <cmath>
#include <numbers>

using namespace beamsim;

namespace
{

Vec2 random_user(const SectorGeometry &g, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> r2(0.0, 1.0), az(-g.region.azimuth_span_rad / 2, g.region.azimuth_span_rad / 2);
    const double r = g.region.radius_m * std::sqrt(r2(rng));
    const double a = az(rng);
    return {r * std::cos(a), r * std::sin(a)};
}

// SINR of every beam for a user without shadowing or fading.
std::vector<double> beam_sinrs(const Codebook &cb, const NetworkLayout &layout, Vec2 user)
{
    std::vector<LinkState> links(layout.sectors.size());
    for (const auto &s : layout.sectors)
        links[static_cast<std::size_t>(s.id)].pathloss_db =
            pathloss_db(cb.geometry().distance_3d(s.position, user) / 1000.0);
    std::vector<double> out;
    for (const auto &b : cb.beams())
        out.push_back(sinr(user, cb.gain(b.id), cb.gain(cb.root()), layout, cb.geometry(), links, RadioConfig{}));
    return out;
}

} // namespace

TEST_CASE("mass-event tree structure")
{
    const Codebook &cb = fixtures::codebook("mass_event", true);
    REQUIRE(cb.depth() == 3);
    CHECK(cb.size() == 15);
    for (int l = 0; l <= 3; ++l)
    {
        CHECK(cb.level(l).size() == (1u << l));
        for (int id : cb.level(l))
        {
            const Beam &b = cb.beam(id);
            CHECK(b.level == l);
            CHECK(b.subarray.n_x == cb.level_specs()[static_cast<std::size_t>(l)].size.n_x);
            CHECK(b.subarray.n_z == cb.level_specs()[static_cast<std::size_t>(l)].size.n_z);
            CHECK(b.parent.has_value() == (l > 0));
            if (b.parent)
            {
                const auto &siblings = cb.beam(*b.parent).children;
                CHECK(std::find(siblings.begin(), siblings.end(), id) != siblings.end());
            }
            CHECK((b.children.empty() ? l == 3 : b.children.size() == 2));
            if (l > 0)
            {
                // Only the narrow beams are held to the steering box.
                CHECK(b.steer.theta_e >= preset("mass_event").space.theta_min - 1e-12);
                CHECK(b.steer.theta_e <= preset("mass_event").space.theta_max + 1e-12);
                CHECK(std::abs(b.steer.phi_e) <= preset("mass_event").space.phi_max + 1e-12);
            }
            CHECK(b.peak_gain_db == doctest::Approx(cb.gain(id).g0_db()).epsilon(1e-12));
        }
    }
    CHECK(cb.root() == 0);
    CHECK(cb.beam(0).target.azimuth_hi - cb.beam(0).target.azimuth_lo == doctest::Approx(2 * std::numbers::pi / 3));
}

TEST_CASE("level-0 beam puts its upper half-power point on the cell edge")
{
    const auto cfg = preset("mass_event");
    const auto g = cfg.geometry();
    const ArrayDesign d = fixtures::mass_event_design().design.with_size(2, 4);
    const SteeringAngles s = wide_beam_steering(d, g);
    CHECK(s.phi_e == 0.0);
    const BeamPattern p(d, s);
    const double edge = 0.5 * std::numbers::pi + g.depression(g.region.radius_m);
    // Peak of the phi = 0 cut, then the half-power point between zenith side and edge.
    double best = 0, best_t = 0;
    for (int i = 0; i <= 20000; ++i)
    {
        const double t = std::numbers::pi * i / 20000;
        const double v = p.normalized({t, 0.0});
        if (v > best)
            best = v, best_t = t;
    }
    CHECK(p.normalized({edge, 0.0}) == doctest::Approx(0.5 * best).epsilon(0.01));
    CHECK(best_t > edge);
}

TEST_CASE("azimuth splits halve the parent's azimuth interval")
{
    const Codebook &cb = fixtures::codebook("rural", false);
    for (const Beam &b : cb.beams())
    {
        if (b.children.size() != 2)
            continue;
        const auto &c0 = cb.beam(b.children[0]).target, &c1 = cb.beam(b.children[1]).target;
        CHECK(c0.azimuth_lo == doctest::Approx(b.target.azimuth_lo));
        CHECK(c1.azimuth_hi == doctest::Approx(b.target.azimuth_hi));
        CHECK(c0.azimuth_hi == doctest::Approx(c1.azimuth_lo));
        CHECK(c0.azimuth_hi == doctest::Approx(0.5 * (b.target.azimuth_lo + b.target.azimuth_hi)));
    }
}

TEST_CASE("per-level coverage is an exact partition")
{
    for (auto [name, relaxed] : {std::pair{"mass_event", true}, {"mass_event", false}, {"rural", false}})
    {
        const Codebook &cb = fixtures::codebook(name, relaxed);
        for (int l = 0; l <= cb.depth(); ++l)
        {
            const auto &r = cb.raster(l);
            const auto &ids = cb.level(l);
            std::size_t covered = 0;
            for (std::size_t k = 0; k < r.owner.size(); ++k)
            {
                if (r.inside[k])
                {
                    REQUIRE(r.owner[k] >= 0);
                    CHECK(std::find(ids.begin(), ids.end(), r.owner[k]) != ids.end());
                }
                else
                    CHECK(r.owner[k] == -1);
            }
            for (int id : ids)
                covered += cb.coverage(id).size();
            CHECK(covered == r.inside_count());
            CHECK(cb.gap_pixels()[static_cast<std::size_t>(l)] <= 0.02 * r.inside_count());
        }
    }
}

TEST_CASE("without relaxation children stay inside the parent")
{
    for (auto name : {"mass_event", "rural"})
    {
        const Codebook &cb = fixtures::codebook(name, false);
        const auto inc = cb.inclusion();
        CHECK(inc.checked_pixels > 0);
        CHECK(inc.holds());
        // Direct check on the rasters.
        for (int l = 1; l <= cb.depth(); ++l)
            for (std::size_t k = 0; k < cb.raster(l).owner.size(); ++k)
                if (cb.raster(l).inside[k])
                    CHECK(cb.beam(cb.raster(l).owner[k]).parent == cb.raster(l - 1).owner[k]);
    }
}

TEST_CASE("relaxed mode reports inclusion without enforcing it")
{
    const Codebook &cb = fixtures::codebook("mass_event", true);
    const auto inc = cb.inclusion();
    CHECK(inc.checked_pixels > 0);
    MESSAGE("relaxed inclusion violations: " << inc.violating_pixels << " of " << inc.checked_pixels);
}

TEST_CASE("greedy search: probe budget, monotone best, comparison with exhaustive search")
{
    const Codebook &cb = fixtures::codebook("mass_event", false);
    const NetworkLayout layout = NetworkLayout::hexagonal(500.0);
    std::mt19937_64 rng(42);
    const int users = 300;
    int matches = 0;
    for (int u = 0; u < users; ++u)
    {
        const Vec2 p = random_user(cb.geometry(), rng);
        const auto s = beam_sinrs(cb, layout, p);
        const auto result = beam_search(cb, [&](int id) { return s[static_cast<std::size_t>(id)]; });
        CHECK(result.probes <= 2 * cb.depth() + 1);
        for (std::size_t i = 1; i < result.best_sinr_trace.size(); ++i)
            CHECK(result.best_sinr_trace[i] >= result.best_sinr_trace[i - 1]);
        CHECK(s[static_cast<std::size_t>(result.best)] == result.best_sinr_trace.back());
        const auto leaves = cb.level(cb.depth());
        int best_leaf = leaves.front();
        for (int id : leaves)
            if (s[static_cast<std::size_t>(id)] > s[static_cast<std::size_t>(best_leaf)])
                best_leaf = id;
        matches += result.best == best_leaf;
    }
    MESSAGE("hierarchical search found the best leaf for " << matches << " of " << users << " users");
    CHECK(matches > 0);
}

TEST_CASE("selection step rules")
{
    const Codebook &cb = fixtures::codebook("mass_event", false);
    const int c0 = cb.beam(0).children[0], c1 = cb.beam(0).children[1];

    SUBCASE("ties keep the running best")
    {
        const auto step = select_beam_step(cb, 0, 5.0, 0, [](int) { return 5.0; });
        CHECK(step.probes == 2);
        CHECK(step.new_best == 0);
        CHECK_FALSE(step.next_cursor.has_value());
    }
    SUBCASE("a strictly better child becomes best and the cursor")
    {
        const auto step = select_beam_step(cb, 0, 1.0, 0, [&](int id) { return id == c1 ? 3.0 : 2.0; });
        CHECK(step.new_best == c1);
        CHECK(step.new_best_sinr == 3.0);
        REQUIRE(step.next_cursor.has_value());
        CHECK(*step.next_cursor == c1);
    }
    SUBCASE("level cap stops probing")
    {
        const auto step = select_beam_step(cb, 0, 1.0, 0, [](int) { return 9.0; }, 0);
        CHECK(step.probes == 0);
        CHECK(step.new_best == 0);
        const auto search = beam_search(cb, [](int) { return 1.0; }, 0);
        CHECK(search.probes == 1);
        CHECK(search.best == 0);
    }
    SUBCASE("a leaf cursor probes nothing")
    {
        const int leaf = cb.level(3).front();
        CHECK(select_beam_step(cb, leaf, 1.0, leaf, [](int) { return 9.0; }).probes == 0);
    }
    SUBCASE("relaxed mode keeps descending below a weaker child")
    {
        const Codebook &relaxed = fixtures::codebook("mass_event", true);
        const auto step = select_beam_step(relaxed, 0, 5.0, 0, [&](int id) { return id == c0 ? 4.0 : 1.0; });
        CHECK(step.new_best == 0);
        REQUIRE(step.next_cursor.has_value());
        CHECK(*step.next_cursor == c0);
    }
}

TEST_CASE("hotspot user converges to a level-3 beam with rising SINR")
{
    const Codebook &cb = fixtures::codebook("mass_event", true);
    const NetworkLayout layout = NetworkLayout::hexagonal(500.0);
    const double b = 15.0 * std::numbers::pi / 180;
    const Vec2 p{200.0 * std::cos(b), 200.0 * std::sin(b)};
    const auto s = beam_sinrs(cb, layout, p);
    const auto result = beam_search(cb, [&](int id) { return s[static_cast<std::size_t>(id)]; });
    CHECK(cb.beam(result.best).level == 3);
    for (std::size_t i = 1; i < result.best_sinr_trace.size(); ++i)
        CHECK(result.best_sinr_trace[i] > result.best_sinr_trace[i - 1]);
    CHECK(result.best_trace.size() == 4);
}

TEST_CASE("codebook JSON round trip is bit-exact")
{
    for (auto [name, relaxed] : {std::pair{"mass_event", true}, {"rural", false}})
    {
        const Codebook &cb = fixtures::codebook(name, relaxed);
        const std::string text = codebook_to_json(cb).dump();
        const Codebook back = codebook_from_json(Json::parse(text));
        REQUIRE(back.size() == cb.size());
        for (std::size_t i = 0; i < cb.size(); ++i)
        {
            const Beam &a = cb.beams()[i], &b = back.beams()[i];
            CHECK(a.steer == b.steer);
            CHECK(a.peak_gain_db == b.peak_gain_db);
            CHECK(a.parent == b.parent);
            CHECK(a.children == b.children);
        }
        for (int l = 0; l <= cb.depth(); ++l)
            CHECK(cb.raster(l).owner == back.raster(l).owner);
        CHECK(codebook_to_json(back).dump() == text);
    }
}

TEST_CASE("malformed codebooks are rejected")
{
    Json j = codebook_to_json(fixtures::codebook("mass_event", true));
    SUBCASE("wrong format tag")
    {
        j["format"] = "other";
        CHECK_THROWS_AS(codebook_from_json(j), std::invalid_argument);
    }
    SUBCASE("broken parent link")
    {
        j["beams"][3]["parent"] = 2;
        CHECK_THROWS(codebook_from_json(j));
    }
}

TEST_CASE("level-0-only codebook covers the whole sector with one beam")
{
    ScenarioConfig cfg = preset("mass_event");
    cfg.levels.resize(1);
    const Codebook cb = build_codebook(fixtures::mass_event_design(), cfg.geometry(), cfg.levels, cfg.space, cfg.codebook);
    CHECK(cb.size() == 1);
    CHECK(cb.depth() == 0);
    CHECK(cb.coverage(0).size() == cb.raster(0).inside_count());
}

TEST_CASE("steering angles are stored at nine significant digits")
{
    CHECK(round_significant(1.23456789012345, 9) == 1.23456789);
    CHECK(round_significant(-0.000123456789012, 9) == -0.000123456789);
    CHECK(round_significant(0.0, 9) == 0.0);
    for (const Beam &b : fixtures::codebook("mass_event", true).beams())
    {
        CHECK(b.steer.theta_e == round_significant(b.steer.theta_e, 9));
        CHECK(b.steer.phi_e == round_significant(b.steer.phi_e, 9));
    }
}
