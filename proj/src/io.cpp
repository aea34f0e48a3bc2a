// SPDX-License-Identifier: Apache-2.0

#include "beamsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace beamsim
{

namespace
{

std::ofstream open_out(const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    return out;
}

Json geometry_to_json(const SectorGeometry &g)
{
    return {{"antenna_height_m", g.antenna_height_m},
            {"user_height_m", g.user_height_m},
            {"cell_radius_m", g.region.radius_m},
            {"azimuth_span_rad", g.region.azimuth_span_rad}};
}

SectorGeometry geometry_from_json(const Json &j)
{
    SectorGeometry g;
    g.antenna_height_m = j.at("antenna_height_m").get<double>();
    g.user_height_m = j.at("user_height_m").get<double>();
    g.region.radius_m = j.at("cell_radius_m").get<double>();
    g.region.azimuth_span_rad = j.at("azimuth_span_rad").get<double>();
    return g;
}

Json region_to_json(const AngularRegion &r)
{
    return Json::array({r.azimuth_lo, r.azimuth_hi, r.depression_lo, r.depression_hi});
}

AngularRegion region_from_json(const Json &j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

} // namespace

Json design_to_json(const ArrayDesign &d)
{
    return {{"n_x", d.n_x}, {"n_z", d.n_z}, {"d_x", d.d_x}, {"d_z", d.d_z}, {"alpha_x", d.alpha_x}, {"alpha_z", d.alpha_z}};
}

ArrayDesign design_from_json(const Json &j)
{
    ArrayDesign d;
    d.n_x = j.at("n_x").get<int>();
    d.n_z = j.at("n_z").get<int>();
    d.d_x = j.at("d_x").get<double>();
    d.d_z = j.at("d_z").get<double>();
    d.alpha_x = j.at("alpha_x").get<double>();
    d.alpha_z = j.at("alpha_z").get<double>();
    return d;
}

Json optimized_to_json(const OptimizedDesign &d)
{
    return {{"design", design_to_json(d.design)},
            {"achieved_gain_db", d.achieved_gain_db},
            {"worst_sidelobe_db", std::isfinite(d.worst_sidelobe_db) ? Json(d.worst_sidelobe_db) : Json("inf")},
            {"feasible", d.feasible}};
}

OptimizedDesign optimized_from_json(const Json &j)
{
    OptimizedDesign d;
    d.design = design_from_json(j.at("design"));
    d.achieved_gain_db = j.at("achieved_gain_db").get<double>();
    const auto &sl = j.at("worst_sidelobe_db");
    d.worst_sidelobe_db = sl.is_string() ? std::numeric_limits<double>::infinity() : sl.get<double>();
    d.feasible = j.at("feasible").get<bool>();
    return d;
}

Json codebook_to_json(const Codebook &cb)
{
    Json levels = Json::array();
    for (const auto &spec : cb.level_specs())
        levels.push_back({{"n_x", spec.size.n_x}, {"n_z", spec.size.n_z}, {"split", to_string(spec.split)}});
    Json beams = Json::array();
    for (const auto &b : cb.beams())
    {
        Json jb = {{"id", b.id},
                   {"level", b.level},
                   {"index", b.index},
                   {"n_x", b.subarray.n_x},
                   {"n_z", b.subarray.n_z},
                   {"theta_e", b.steer.theta_e},
                   {"phi_e", b.steer.phi_e},
                   {"peak_gain_db", b.peak_gain_db},
                   {"parent", b.parent ? Json(*b.parent) : Json(nullptr)},
                   {"children", b.children},
                   {"target", region_to_json(b.target)}};
        beams.push_back(std::move(jb));
    }
    const auto &o = cb.options();
    return {{"format", "beamsim-codebook"},
            {"version", 1},
            {"design", optimized_to_json(cb.design())},
            {"geometry", geometry_to_json(cb.geometry())},
            {"options",
             {{"relaxed", o.relaxed},
              {"pixel_m", o.pixel_m},
              {"max_gap_fraction", o.max_gap_fraction},
              {"quadrature_resolution", o.quadrature_resolution}}},
            {"levels", levels},
            {"beams", beams}};
}

Codebook codebook_from_json(const Json &j)
{
    if (j.value("format", "") != "beamsim-codebook")
        throw std::invalid_argument("not a codebook file");
    const OptimizedDesign design = optimized_from_json(j.at("design"));
    const SectorGeometry geometry = geometry_from_json(j.at("geometry"));
    CodebookOptions options;
    const auto &jo = j.at("options");
    options.relaxed = jo.at("relaxed").get<bool>();
    options.pixel_m = jo.at("pixel_m").get<double>();
    options.max_gap_fraction = jo.at("max_gap_fraction").get<double>();
    options.quadrature_resolution = jo.at("quadrature_resolution").get<int>();
    std::vector<LevelSpec> levels;
    for (const auto &jl : j.at("levels"))
        levels.push_back({{jl.at("n_x").get<int>(), jl.at("n_z").get<int>()},
                          split_axis_from_string(jl.at("split").get<std::string>())});
    std::vector<Beam> beams;
    for (const auto &jb : j.at("beams"))
    {
        Beam b;
        b.id = jb.at("id").get<int>();
        b.level = jb.at("level").get<int>();
        b.index = jb.at("index").get<int>();
        b.subarray = {jb.at("n_x").get<int>(), jb.at("n_z").get<int>()};
        b.steer = {jb.at("theta_e").get<double>(), jb.at("phi_e").get<double>()};
        b.peak_gain_db = jb.at("peak_gain_db").get<double>();
        if (!jb.at("parent").is_null())
            b.parent = jb.at("parent").get<int>();
        b.children = jb.at("children").get<std::vector<int>>();
        b.target = region_from_json(jb.at("target"));
        beams.push_back(std::move(b));
    }
    return assemble_codebook(design, geometry, levels, std::move(beams), options);
}

Json shape_to_json(double m_shape)
{
    if (std::isinf(m_shape))
        return "inf";
    return m_shape;
}

double shape_from_json(const Json &j)
{
    if (j.is_string())
    {
        if (j.get<std::string>() == "inf")
            return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("Nakagami shape must be a number or \"inf\"");
    }
    return j.get<double>();
}

Json kpi_to_json(const KpiReport &r)
{
    return {{"mut_bps", r.mut_bps},
            {"cet_bps", r.cet_bps},
            {"pc_w", r.pc_w},
            {"busy_fraction", r.busy_fraction},
            {"sessions_arrived", r.sessions_arrived},
            {"sessions_handed_off", r.sessions_handed_off},
            {"sessions_completed", r.sessions_completed},
            {"offered_load_bps", r.offered_load_bps},
            {"estimated_utilization", r.estimated_utilization},
            {"mean_probes", r.mean_probes},
            {"max_probes", r.max_probes},
            {"measured_time_s", r.measured_time_s},
            {"beam_histogram", r.beam_histogram}};
}

KpiReport kpi_from_json(const Json &j)
{
    KpiReport r;
    r.mut_bps = j.at("mut_bps").get<double>();
    r.cet_bps = j.at("cet_bps").get<double>();
    r.pc_w = j.at("pc_w").get<double>();
    r.busy_fraction = j.at("busy_fraction").get<double>();
    r.sessions_arrived = j.at("sessions_arrived").get<std::uint64_t>();
    r.sessions_handed_off = j.at("sessions_handed_off").get<std::uint64_t>();
    r.sessions_completed = j.at("sessions_completed").get<std::uint64_t>();
    r.offered_load_bps = j.at("offered_load_bps").get<double>();
    r.estimated_utilization = j.at("estimated_utilization").get<double>();
    r.mean_probes = j.at("mean_probes").get<double>();
    r.max_probes = j.at("max_probes").get<int>();
    r.measured_time_s = j.at("measured_time_s").get<double>();
    r.beam_histogram = j.at("beam_histogram").get<std::vector<std::uint64_t>>();
    return r;
}

Json read_json_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read " + path.string());
    try
    {
        return Json::parse(in);
    }
    catch (const Json::parse_error &e)
    {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path &path, const Json &j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_raster_csv(const std::filesystem::path &path, const CoverageRaster &raster)
{
    auto out = open_out(path);
    out << "x_m,y_m,beam_id\n";
    for (int iy = 0; iy < raster.ny; ++iy)
        for (int ix = 0; ix < raster.nx; ++ix)
        {
            const auto k = static_cast<std::size_t>(iy * raster.nx + ix);
            if (!raster.inside[k])
                continue;
            const Vec2 c = raster.center(ix, iy);
            out << c.x << ',' << c.y << ',' << raster.owner[k] << '\n';
        }
}

void write_pattern_grid_csv(const std::filesystem::path &path, const std::vector<PatternSample> &samples)
{
    auto out = open_out(path);
    out << "theta_rad,phi_rad,gain_dbi\n";
    for (const auto &s : samples)
        out << s.direction.theta << ',' << s.direction.phi << ',' << s.absolute_gain_db << '\n';
}

void write_cut_csv(const std::filesystem::path &path, const std::vector<std::pair<double, double>> &cut)
{
    auto out = open_out(path);
    out << "angle_rad,gain_dbi\n";
    for (const auto &[angle, gain] : cut)
        out << angle << ',' << gain << '\n';
}

void write_sessions_csv(const std::filesystem::path &path, const std::vector<SessionRecord> &sessions)
{
    auto out = open_out(path);
    out << "id,arrival_s,x_m,y_m,file_bits,sojourn_s,throughput_bps,final_beam,probes\n";
    for (const auto &s : sessions)
        out << s.id << ',' << s.arrival_s << ',' << s.position.x << ',' << s.position.y << ',' << s.file_bits << ','
            << s.sojourn_s << ',' << s.throughput_bps << ',' << s.final_beam << ',' << s.probes << '\n';
}

void write_histogram_csv(const std::filesystem::path &path, const Codebook &codebook, const KpiReport &report)
{
    auto out = open_out(path);
    out << "beam_id,level,index,served_slots,probability\n";
    std::uint64_t total = 0;
    for (auto n : report.beam_histogram)
        total += n;
    for (std::size_t b = 0; b < report.beam_histogram.size(); ++b)
    {
        const Beam &beam = codebook.beam(static_cast<int>(b));
        const double p = total ? static_cast<double>(report.beam_histogram[b]) / static_cast<double>(total) : 0.0;
        out << b << ',' << beam.level << ',' << beam.index << ',' << report.beam_histogram[b] << ',' << p << '\n';
    }
}

} // namespace beamsim
