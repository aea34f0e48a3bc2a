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

CellModel mass_event_cell()
{
    const auto cfg = preset("mass_event");
    return {&fixtures::codebook("mass_event", true), cfg.layout(), cfg.radio};
}

SimSettings short_settings(double horizon)
{
    SimSettings s;
    s.horizon_s = horizon;
    return s;
}

Vec2 hotspot_point()
{
    const double b = 15.0 * std::numbers::pi / 180;
    return {200.0 * std::cos(b), 200.0 * std::sin(b)};
}

} // namespace

TEST_CASE("power consumption model")
{
    CHECK(power_consumption(0.0, 40.0) == 260.0);
    CHECK(power_consumption(1.0, 40.0) == doctest::Approx(260.0 + 9.4 * 40.0));
    CHECK(power_consumption(0.5, 40.0) == doctest::Approx(448.0));
}

TEST_CASE("percentile interpolates linearly")
{
    CHECK(percentile({5, 1, 4, 2, 3}, 0.05) == doctest::Approx(1.2));
    CHECK(percentile({5, 1, 4, 2, 3}, 0.5) == doctest::Approx(3.0));
    CHECK(percentile({7}, 0.05) == 7.0);
    CHECK(percentile({1, 2}, 1.0) == 2.0);
}

TEST_CASE("PF pick maximizes rate over average, ties to the lowest index")
{
    CHECK(pf_pick({10, 20, 30}, {1, 4, 10}) == 0);
    CHECK(pf_pick({10, 20, 30}, {10, 10, 10}) == 2);
    CHECK(pf_pick({10, 10}, {5, 5}) == 0);
}

TEST_CASE("traffic intensity and arrival rate")
{
    TrafficModel t;
    t.uniform = 1.0;
    SectorRegion region;
    region.radius_m = 500.0;
    const double area_km2 = region.area_m2() * 1e-6;
    CHECK(t.arrival_rate(region) == doctest::Approx(area_km2).epsilon(0.01));
    t.hotspot = Hotspot{{100.0, 0.0}, 50.0, 30.0};
    CHECK(t.intensity({100.0, 0.0}) == doctest::Approx(31.0));
    CHECK(t.intensity({150.0, 0.0}) == doctest::Approx(1.0 + 30.0 * std::exp(-0.5)));
    CHECK(t.max_intensity() == doctest::Approx(31.0));
    TrafficModel bad;
    bad.uniform = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("spatial Poisson arrivals: counts and hotspot centroid")
{
    const auto cfg = preset("mass_event");
    const SectorRegion region = cfg.geometry().region;
    const TrafficModel traffic = cfg.traffic();
    const double duration = 200.0;
    const double expected = traffic.arrival_rate(region, 800) * duration;

    // Intensity-weighted centroid by quadrature over the wedge.
    double wsum = 0, cx = 0, cy = 0;
    const int grid = 600;
    const auto box = region.bounding_box();
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
        {
            const Vec2 p{box.x_min + (box.x_max - box.x_min) * (i + 0.5) / grid,
                         box.y_min + (box.y_max - box.y_min) * (j + 0.5) / grid};
            if (!region.contains(p))
                continue;
            const double w = traffic.intensity(p);
            wsum += w;
            cx += w * p.x;
            cy += w * p.y;
        }
    cx /= wsum;
    cy /= wsum;

    for (std::uint64_t seed : {1, 2, 3})
    {
        auto rng = make_stream(seed, kTestStream, 7);
        const auto arrivals = draw_arrivals(traffic, duration, region, rng);
        const double n = static_cast<double>(arrivals.size());
        CHECK(std::abs(n - expected) <= 3.0 * std::sqrt(expected));
        double mx = 0, my = 0, mx2 = 0, my2 = 0;
        for (std::size_t i = 0; i < arrivals.size(); ++i)
        {
            CHECK(region.contains(arrivals[i].position));
            CHECK(arrivals[i].time >= 0.0);
            CHECK(arrivals[i].time < duration);
            if (i > 0)
                CHECK(arrivals[i].time >= arrivals[i - 1].time);
            mx += arrivals[i].position.x;
            my += arrivals[i].position.y;
            mx2 += arrivals[i].position.x * arrivals[i].position.x;
            my2 += arrivals[i].position.y * arrivals[i].position.y;
        }
        // Sample mean within 4 standard errors of the quadrature centroid.
        const double sx = std::sqrt(mx2 / n - (mx / n) * (mx / n)), sy = std::sqrt(my2 / n - (my / n) * (my / n));
        CHECK(std::abs(mx / n - cx) <= 4 * sx / std::sqrt(n));
        CHECK(std::abs(my / n - cy) <= 4 * sy / std::sqrt(n));
    }
}

TEST_CASE("two identical users share the slots equally")
{
    const CellModel cell = mass_event_cell();
    SimSettings s = short_settings(100.0);
    s.shadowing_db = 0.0;
    s.m_shape = kNoFading;
    s.level_cap = 0;
    Simulator sim(cell, s, 1);
    const Vec2 p{150.0, 20.0};
    REQUIRE(sim.admit(0, {0.0, p}, 1'000'000'000) != nullptr);
    REQUIRE(sim.admit(1, {0.0, p}, 1'000'000'000) != nullptr);
    int served[2] = {0, 0};
    for (int k = 0; k < 1000; ++k)
        ++served[*sim.schedule_slot().user];
    CHECK(served[0] == 500);
    CHECK(served[1] == 500);
}

TEST_CASE("first service is on the level-0 beam and the search descends one level per slot")
{
    const CellModel cell = mass_event_cell();
    SimSettings s = short_settings(100.0);
    s.shadowing_db = 0.0;
    Simulator sim(cell, s, 3);
    const UserSession *u = sim.admit(0, {0.0, hotspot_point()}, 1'000'000'000);
    REQUIRE(u != nullptr);
    CHECK(u->best_beam == 0);
    CHECK(u->probes == 1);
    const SlotOutcome first = sim.schedule_slot();
    CHECK(first.beam == 0);
    CHECK(first.probes == 2);
    int last_level = 0;
    for (int k = 0; k < 10; ++k)
    {
        const SlotOutcome slot = sim.schedule_slot();
        const int level = cell.codebook->beam(slot.beam).level;
        CHECK(level >= last_level);
        last_level = level;
    }
    CHECK(last_level == 3);
    CHECK(sim.active().front().probes <= 2 * 3 + 1);
}

TEST_CASE("a session delivers exactly its file")
{
    const CellModel cell = mass_event_cell();
    SimSettings s = short_settings(100.0);
    Simulator sim(cell, s, 5);
    const std::uint64_t bits = 3'000'001;
    REQUIRE(sim.admit(0, {0.0, {120.0, -30.0}}, bits) != nullptr);
    std::uint64_t delivered = 0;
    double busy = 0;
    SlotOutcome slot;
    do
    {
        slot = sim.schedule_slot();
        delivered += slot.delivered_bits;
        busy += slot.busy_s;
    } while (!slot.completed);
    CHECK(delivered == bits);
    const auto done = sim.take_completed();
    REQUIRE(done.size() == 1);
    CHECK(done[0].file_bits == bits);
    CHECK(done[0].sojourn_s == doctest::Approx(busy).epsilon(1e-12));
    CHECK(done[0].throughput_bps == doctest::Approx(bits / busy).epsilon(1e-12));
    CHECK(sim.active().empty());
}

TEST_CASE("users attached to a neighbour are handed off")
{
    const CellModel cell = mass_event_cell();
    SimSettings s = short_settings(10.0);
    s.shadowing_db = 0.0;
    Simulator sim(cell, s, 1);
    // Beyond the cell edge towards the first-ring neighbour at bearing 30 degrees.
    const double b = std::numbers::pi / 6;
    CHECK(sim.admit(0, {0.0, {420.0 * std::cos(b), 420.0 * std::sin(b)}}, 1000) == nullptr);
    CHECK(sim.admit(1, {0.0, {100.0, 0.0}}, 1000) != nullptr);
    s.best_server_attachment = false;
    Simulator all(cell, s, 1);
    CHECK(all.admit(0, {0.0, {420.0 * std::cos(b), 420.0 * std::sin(b)}}, 1000) != nullptr);
}

TEST_CASE("zero traffic leaves the base station idle")
{
    const CellModel cell = mass_event_cell();
    TrafficModel none;
    none.uniform = 0.0;
    const KpiReport r = run(cell, none, short_settings(50.0), 1);
    CHECK(r.pc_w == 260.0);
    CHECK(r.busy_fraction == 0.0);
    CHECK(r.sessions_completed == 0);
}

TEST_CASE("runs are deterministic and seeds matter")
{
    const CellModel cell = mass_event_cell();
    const TrafficModel traffic = preset("mass_event").traffic();
    const SimSettings s = short_settings(60.0);
    const auto a = kpi_to_json(run(cell, traffic, s, 7)).dump();
    const auto b = kpi_to_json(run(cell, traffic, s, 7)).dump();
    const auto c = kpi_to_json(run(cell, traffic, s, 8)).dump();
    CHECK(a == b);
    CHECK(a != c);

    const auto p1 = kpi_to_json(run_replications(cell, traffic, s, {3, 1, 2})).dump();
    const auto p2 = kpi_to_json(run_replications(cell, traffic, s, {1, 2, 3})).dump();
    CHECK(p1 == p2);
}

TEST_CASE("KPI bookkeeping")
{
    const CellModel cell = mass_event_cell();
    const TrafficModel traffic = preset("mass_event").traffic();
    SimSettings s = short_settings(120.0);
    const KpiReport r = run(cell, traffic, s, 11);
    REQUIRE(r.sessions_completed > 50);
    CHECK(r.sessions_completed <= r.sessions_arrived);
    CHECK(r.sessions_completed == r.sessions.size());
    CHECK(r.max_probes <= 2 * 3 + 1);
    CHECK(r.mean_probes >= 1.0);
    CHECK(r.cet_bps <= r.mut_bps);
    CHECK(r.pc_w == doctest::Approx(power_consumption(r.busy_fraction, 40.0)));
    double sum = 0;
    for (const auto &x : r.sessions)
    {
        CHECK(x.arrival_s >= 0.1 * s.horizon_s);
        CHECK(x.arrival_s + x.sojourn_s <= s.horizon_s);
        CHECK(x.throughput_bps == doctest::Approx(x.file_bits / x.sojourn_s));
        CHECK(x.throughput_bps <= 4.8 * 10e6 * (1 + 1e-9));
        sum += x.throughput_bps;
    }
    CHECK(r.mut_bps == doctest::Approx(sum / static_cast<double>(r.sessions.size())));
    std::uint64_t slots = 0;
    for (auto n : r.beam_histogram)
        slots += n;
    CHECK(static_cast<double>(slots) * s.slot_s >= r.busy_fraction * r.measured_time_s - 1e-9);

    s.level_cap = 0;
    const KpiReport wide = run(cell, traffic, s, 11);
    for (std::size_t b = 1; b < wide.beam_histogram.size(); ++b)
        CHECK(wide.beam_histogram[b] == 0);
    CHECK(wide.max_probes == 1);
}

TEST_CASE("pooling merges sessions before taking percentiles")
{
    KpiReport a, b;
    a.beam_histogram = {1, 2};
    b.beam_histogram = {3, 4};
    a.pc_w = 300;
    b.pc_w = 400;
    a.busy_fraction = 0.2;
    b.busy_fraction = 0.4;
    for (double t : {1.0, 2.0, 3.0})
        a.sessions.push_back({0, 0, {}, 1, 1, t, 0, 1});
    for (double t : {10.0, 20.0})
        b.sessions.push_back({0, 0, {}, 1, 1, t, 0, 1});
    const KpiReport p = pool_reports({a, b});
    CHECK(p.sessions_completed == 5);
    CHECK(p.mut_bps == doctest::Approx(36.0 / 5));
    CHECK(p.cet_bps == doctest::Approx(percentile({1, 2, 3, 10, 20}, 0.05)));
    CHECK(p.pc_w == doctest::Approx(350.0));
    CHECK(p.busy_fraction == doctest::Approx(0.3));
    CHECK(p.beam_histogram == std::vector<std::uint64_t>{4, 6});
    KpiReport c;
    c.beam_histogram = {1};
    CHECK_THROWS_AS(pool_reports({a, c}), std::invalid_argument);
}

TEST_CASE("overload is reported as instability")
{
    const CellModel cell = mass_event_cell();
    TrafficModel heavy;
    heavy.uniform = 400.0;
    SimSettings s = short_settings(60.0);
    s.max_users = 20;
    s.level_cap = 0;
    CHECK_THROWS_AS(run(cell, heavy, s, 1), UnstableError);
}

TEST_CASE("settings validation")
{
    SimSettings s;
    s.m_shape = 0.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.warmup_fraction = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.horizon_s = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
