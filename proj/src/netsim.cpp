// SPDX-License-Identifier: Apache-2.0

#include "beamsim/netsim.hpp"

#include "beamsim/parallel.hpp"
#include "beamsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace beamsim
{

namespace
{

constexpr double kM2PerKm2 = 1e6;

} // namespace

void TrafficModel::validate() const
{
    if (!(uniform >= 0.0))
        throw std::invalid_argument("TrafficModel: uniform intensity must be non-negative");
    if (hotspot && (!(hotspot->peak >= 0.0) || !(hotspot->sigma_m > 0.0)))
        throw std::invalid_argument("TrafficModel: hotspot needs peak >= 0 and sigma > 0");
    if (!(mean_file_bits > 0.0))
        throw std::invalid_argument("TrafficModel: mean file size must be positive");
}

double TrafficModel::intensity(Vec2 p) const
{
    double value = uniform;
    if (hotspot)
    {
        const double dx = p.x - hotspot->center.x, dy = p.y - hotspot->center.y;
        value += hotspot->peak * std::exp(-0.5 * (dx * dx + dy * dy) / (hotspot->sigma_m * hotspot->sigma_m));
    }
    return value;
}

double TrafficModel::max_intensity() const
{
    return uniform + (hotspot ? hotspot->peak : 0.0);
}

double TrafficModel::arrival_rate(const SectorRegion &region, int grid) const
{
    const BoundingBox box = region.bounding_box();
    const double hx = (box.x_max - box.x_min) / grid, hy = (box.y_max - box.y_min) / grid;
    double sum = 0.0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
        {
            const Vec2 p{box.x_min + (i + 0.5) * hx, box.y_min + (j + 0.5) * hy};
            if (region.contains(p))
                sum += intensity(p);
        }
    return sum * hx * hy / kM2PerKm2;
}

std::vector<Arrival> draw_arrivals(const TrafficModel &traffic, double duration, const SectorRegion &region,
                                   std::mt19937_64 &rng)
{
    if (!(duration > 0.0))
        throw std::invalid_argument("draw_arrivals: duration must be positive");
    traffic.validate();
    std::vector<Arrival> out;
    const double lambda_max = traffic.max_intensity();
    if (lambda_max <= 0.0)
        return out;
    const BoundingBox box = region.bounding_box();
    const double mean = lambda_max * box.area() / kM2PerKm2 * duration;
    std::poisson_distribution<std::uint64_t> count(mean);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::uint64_t n = count(rng);
    out.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const double t = unit(rng) * duration;
        const Vec2 p{box.x_min + unit(rng) * (box.x_max - box.x_min), box.y_min + unit(rng) * (box.y_max - box.y_min)};
        const double accept = unit(rng);
        if (region.contains(p) && accept * lambda_max < traffic.intensity(p))
            out.push_back({t, p});
    }
    std::sort(out.begin(), out.end(), [](const Arrival &a, const Arrival &b) { return a.time < b.time; });
    return out;
}

double power_consumption(double busy_fraction, double tx_power_w)
{
    if (!(busy_fraction >= 0.0 && busy_fraction <= 1.0))
        throw std::invalid_argument("power_consumption: busy fraction must lie in [0, 1]");
    return kIdlePowerW + kPowerSlope * tx_power_w * busy_fraction;
}

void SimSettings::validate() const
{
    if (!(horizon_s > 0.0) || !(slot_s > 0.0) || !(pf_window_slots >= 1.0))
        throw std::invalid_argument("SimSettings: horizon, slot and PF window must be positive");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw std::invalid_argument("SimSettings: warmup fraction must lie in [0, 1)");
    if (!(m_shape >= 1.0))
        throw std::invalid_argument("SimSettings: Nakagami shape must be >= 1");
    if (!(shadowing_db >= 0.0))
        throw std::invalid_argument("SimSettings: shadowing std must be non-negative");
    if (max_users == 0)
        throw std::invalid_argument("SimSettings: max_users must be positive");
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::size_t pf_pick(const std::vector<double> &rates, const std::vector<double> &averages)
{
    if (rates.empty() || rates.size() != averages.size())
        throw std::invalid_argument("pf_pick: need matching non-empty inputs");
    std::size_t best = 0;
    double best_metric = rates[0] / averages[0];
    for (std::size_t i = 1; i < rates.size(); ++i)
    {
        const double metric = rates[i] / averages[i];
        if (metric > best_metric)
        {
            best_metric = metric;
            best = i;
        }
    }
    return best;
}

Simulator::Simulator(const CellModel &cell, const SimSettings &settings, std::uint64_t seed)
    : cell_(cell), settings_(settings), seed_(seed)
{
    if (!cell.codebook)
        throw std::invalid_argument("Simulator: cell model has no codebook");
    settings.validate();
    cell.radio.validate();
    noise_w_ = cell.radio.noise_w();
}

const UserSession *Simulator::admit(std::uint64_t id, const Arrival &arrival, std::uint64_t file_bits)
{
    const Codebook &cb = *cell_.codebook;
    const SectorGeometry &geometry = cb.geometry();
    auto setup = make_stream(seed_, kUserSetupStream, id);

    UserSession u;
    u.id = id;
    u.position = arrival.position;
    u.arrival_s = arrival.time;
    u.file_bits = file_bits;
    u.remaining_bits = file_bits;
    u.best_beam = cb.root();
    u.cursor = cb.root();
    u.probes = 1;  // level-0 CQI
    u.fading_rng = make_stream(seed_, kUserFadingStream, id);

    const auto &layout = cell_.layout;
    const double p = cell_.radio.tx_power_w;
    std::vector<double> path_gain(layout.sectors.size());
    for (const auto &s : layout.sectors)
    {
        const double shadow = draw_shadowing_db(settings_.shadowing_db, setup);
        const double d_km = geometry.distance_3d(s.position, u.position) / 1000.0;
        path_gain[static_cast<std::size_t>(s.id)] = from_db(shadow - pathloss_db(d_km));
    }
    const Sector &serving = layout.sectors.at(static_cast<std::size_t>(layout.serving));
    const Direction dir = geometry.direction_to(serving.position, serving.azimuth_rad, u.position);
    u.beam_rx_w.resize(cb.size());
    for (std::size_t b = 0; b < cb.size(); ++b)
        u.beam_rx_w[b] = p * cb.gain(static_cast<int>(b)).linear(dir) * path_gain[static_cast<std::size_t>(serving.id)];
    // Interferers radiate the level-0 pattern.
    const BeamGain &sector_pattern = cb.gain(cb.root());
    for (int id : layout.interferers)
    {
        const Sector &s = layout.sectors.at(static_cast<std::size_t>(id));
        u.interferer_rx_w.push_back(p * sector_pattern.linear(geometry.direction_to(s.position, s.azimuth_rad, u.position)) *
                                    path_gain[static_cast<std::size_t>(id)]);
    }
    if (settings_.best_server_attachment)
    {
        const double own = u.beam_rx_w[static_cast<std::size_t>(cb.root())];
        if (std::any_of(u.interferer_rx_w.begin(), u.interferer_rx_w.end(), [own](double w) { return w > own; }))
            return nullptr;
    }
    active_.push_back(std::move(u));
    if (active_.size() > settings_.max_users)
        throw UnstableError("simulation: more than " + std::to_string(settings_.max_users) +
                            " users in the system; offered load exceeds capacity");
    return &active_.back();
}

void Simulator::skip_to(double t)
{
    const auto target = static_cast<std::int64_t>(std::ceil(t / settings_.slot_s - 1e-9));
    slot_ = std::max(slot_, target);
}

std::vector<SessionRecord> Simulator::take_completed()
{
    return std::exchange(completed_, {});
}

double Simulator::beam_sinr(const UserSession &user, int beam_id, double serving_fading, double interference_w) const
{
    return user.beam_rx_w[static_cast<std::size_t>(beam_id)] * serving_fading / (interference_w + noise_w_);
}

SlotOutcome Simulator::schedule_slot()
{
    SlotOutcome out;
    const double t0 = now();
    ++slot_;
    if (active_.empty())
        return out;

    const std::size_t n = active_.size();
    std::vector<double> rates(n), averages(n), serving_fading(n), interference(n), sinrs(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto &u = active_[i];
        // Serving link first, then interferers in layout order.
        const double h0 = draw_fading(settings_.m_shape, u.fading_rng);
        double sum = 0.0;
        for (double w : u.interferer_rx_w)
            sum += w * draw_fading(settings_.m_shape, u.fading_rng);
        serving_fading[i] = h0;
        interference[i] = sum;
        sinrs[i] = beam_sinr(u, u.best_beam, h0, sum);
        rates[i] = rate_bps(sinrs[i], cell_.radio);
        averages[i] = u.pf_avg_bps;
    }
    const std::size_t k = pf_pick(rates, averages);
    UserSession &u = active_[k];
    out.user = u.id;
    out.beam = u.best_beam;
    out.sinr = sinrs[k];
    out.rate_bps = rates[k];

    const double capacity = rates[k] * settings_.slot_s;
    if (rates[k] > 0.0 && static_cast<double>(u.remaining_bits) <= capacity)
    {
        out.delivered_bits = u.remaining_bits;
        out.busy_s = static_cast<double>(u.remaining_bits) / rates[k];
        out.completed = true;
    }
    else
    {
        out.delivered_bits = std::min<std::uint64_t>(u.remaining_bits, static_cast<std::uint64_t>(capacity));
        out.busy_s = settings_.slot_s;
    }
    u.remaining_bits -= out.delivered_bits;

    if (!out.completed && u.cursor)
    {
        const double h0 = serving_fading[k], interf = interference[k];
        auto probe = [&](int beam) { return beam_sinr(u, beam, h0, interf); };
        const auto step = select_beam_step(*cell_.codebook, u.best_beam, sinrs[k], *u.cursor, probe,
                                           settings_.level_cap);
        u.best_beam = step.new_best;
        u.cursor = step.next_cursor;
        u.probes += step.probes;
        out.probes = step.probes;
    }

    const double forget = 1.0 / settings_.pf_window_slots;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double served = i == k ? static_cast<double>(out.delivered_bits) / settings_.slot_s : 0.0;
        active_[i].pf_avg_bps = (1.0 - forget) * active_[i].pf_avg_bps + forget * served;
    }

    if (out.completed)
    {
        SessionRecord r;
        r.id = u.id;
        r.arrival_s = u.arrival_s;
        r.position = u.position;
        r.file_bits = u.file_bits;
        r.sojourn_s = t0 + out.busy_s - u.arrival_s;
        r.throughput_bps = static_cast<double>(u.file_bits) / r.sojourn_s;
        r.final_beam = u.best_beam;
        r.probes = u.probes;
        completed_.push_back(r);
        active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

KpiReport run(const CellModel &cell, const TrafficModel &traffic, const SimSettings &settings, std::uint64_t seed)
{
    settings.validate();
    traffic.validate();
    if (!cell.codebook)
        throw std::invalid_argument("run: cell model has no codebook");
    const Codebook &cb = *cell.codebook;
    const SectorRegion &region = cb.geometry().region;

    auto arrival_rng = make_stream(seed, kArrivalStream, 0);
    const auto arrivals = draw_arrivals(traffic, settings.horizon_s, region, arrival_rng);
    const double warmup = settings.warmup_fraction * settings.horizon_s;

    KpiReport report;
    report.beam_histogram.assign(cb.size(), 0);
    report.measured_time_s = settings.horizon_s - warmup;
    const double rate_per_s = traffic.arrival_rate(region);
    report.offered_load_bps = rate_per_s * traffic.mean_file_bits;

    // Mean-channel utilization of the level-0 beam over the drawn positions that
    // attach to this sector without shadowing.
    if (!arrivals.empty())
    {
        const auto &geometry = cb.geometry();
        const BeamGain &wide = cb.gain(cb.root());
        const std::size_t stride = std::max<std::size_t>(1, arrivals.size() / 2000);
        auto received = [&](const Sector &s, Vec2 x) {
            return cell.radio.tx_power_w * wide.linear(geometry.direction_to(s.position, s.azimuth_rad, x)) *
                   from_db(-pathloss_db(geometry.distance_3d(s.position, x) / 1000.0));
        };
        double inverse_rate = 0.0;
        std::size_t samples = 0, attached = 0;
        std::vector<double> interferer_w;
        for (std::size_t i = 0; i < arrivals.size(); i += stride)
        {
            const Vec2 x = arrivals[i].position;
            ++samples;
            interferer_w.clear();
            for (int id : cell.layout.interferers)
                interferer_w.push_back(received(cell.layout.sectors.at(static_cast<std::size_t>(id)), x));
            const double signal = received(cell.layout.sectors.at(static_cast<std::size_t>(cell.layout.serving)), x);
            if (settings.best_server_attachment && *std::max_element(interferer_w.begin(), interferer_w.end()) > signal)
                continue;
            ++attached;
            const std::vector<double> ones(interferer_w.size(), 1.0);
            const double r = rate_bps(sinr_from_powers(signal, 1.0, interferer_w, ones, cell.radio.noise_w()),
                                      cell.radio);
            inverse_rate += r > 0.0 ? 1.0 / r : 0.0;
        }
        report.estimated_utilization = report.offered_load_bps * inverse_rate / static_cast<double>(samples);
        report.offered_load_bps *= static_cast<double>(attached) / static_cast<double>(samples);
    }

    Simulator sim(cell, settings, seed);
    std::size_t next = 0;
    double busy = 0.0;
    while (sim.now() < settings.horizon_s)
    {
        while (next < arrivals.size() && arrivals[next].time <= sim.now())
        {
            auto size_rng = make_stream(seed, kFileSizeStream, next);
            std::exponential_distribution<double> size(1.0 / traffic.mean_file_bits);
            const auto bits = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(size(size_rng))));
            const bool attached = sim.admit(next, arrivals[next], bits) != nullptr;
            if (arrivals[next].time >= warmup)
                ++(attached ? report.sessions_arrived : report.sessions_handed_off);
            ++next;
        }
        if (sim.active().empty())
        {
            if (next >= arrivals.size())
                break;
            sim.skip_to(arrivals[next].time);
            continue;
        }
        const double t0 = sim.now();
        const SlotOutcome slot = sim.schedule_slot();
        if (t0 >= warmup)
        {
            busy += slot.busy_s;
            report.beam_histogram[static_cast<std::size_t>(slot.beam)] += 1;
        }
        for (auto &r : sim.take_completed())
        {
            const double done = r.arrival_s + r.sojourn_s;
            if (r.arrival_s >= warmup && done <= settings.horizon_s)
                report.sessions.push_back(r);
        }
    }

    report.busy_fraction = std::clamp(busy / report.measured_time_s, 0.0, 1.0);
    report.pc_w = power_consumption(report.busy_fraction, cell.radio.tx_power_w);
    return pool_reports({report});
}

KpiReport pool_reports(const std::vector<KpiReport> &reports)
{
    KpiReport out;
    if (reports.empty())
        return out;
    out.beam_histogram.assign(reports.front().beam_histogram.size(), 0);
    double busy = 0.0, pc = 0.0, offered = 0.0, util = 0.0;
    for (const auto &r : reports)
    {
        if (r.beam_histogram.size() != out.beam_histogram.size())
            throw std::invalid_argument("pool_reports: reports come from different codebooks");
        out.sessions.insert(out.sessions.end(), r.sessions.begin(), r.sessions.end());
        for (std::size_t b = 0; b < out.beam_histogram.size(); ++b)
            out.beam_histogram[b] += r.beam_histogram[b];
        out.sessions_arrived += r.sessions_arrived;
        out.sessions_handed_off += r.sessions_handed_off;
        out.measured_time_s += r.measured_time_s;
        busy += r.busy_fraction;
        pc += r.pc_w;
        offered += r.offered_load_bps;
        util += r.estimated_utilization;
    }
    const auto n = static_cast<double>(reports.size());
    out.busy_fraction = busy / n;
    out.pc_w = pc / n;
    out.offered_load_bps = offered / n;
    out.estimated_utilization = util / n;
    out.sessions_completed = out.sessions.size();

    std::vector<double> throughput;
    throughput.reserve(out.sessions.size());
    std::uint64_t probes = 0;
    for (const auto &s : out.sessions)
    {
        throughput.push_back(s.throughput_bps);
        probes += static_cast<std::uint64_t>(s.probes);
        out.max_probes = std::max(out.max_probes, s.probes);
    }
    if (!throughput.empty())
    {
        out.mut_bps = std::accumulate(throughput.begin(), throughput.end(), 0.0) / static_cast<double>(throughput.size());
        out.cet_bps = percentile(throughput, 0.05);
        out.mean_probes = static_cast<double>(probes) / static_cast<double>(throughput.size());
    }
    return out;
}

KpiReport run_replications(const CellModel &cell, const TrafficModel &traffic, const SimSettings &settings,
                           const std::vector<std::uint64_t> &seeds)
{
    std::vector<std::uint64_t> ordered = seeds;
    std::sort(ordered.begin(), ordered.end());
    std::vector<KpiReport> reports(ordered.size());
    parallel_for(ordered.size(), [&](std::size_t i) { reports[i] = run(cell, traffic, settings, ordered[i]); });
    return pool_reports(reports);
}

} // namespace beamsim
