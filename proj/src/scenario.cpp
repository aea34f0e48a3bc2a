// SPDX-License-Identifier: Apache-2.0

#include "beamsim/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace beamsim
{

namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

// Reads required keys from one JSON object and rejects anything it did not read.
class Section
{
public:
    Section(const Json &j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            throw ConfigError(where_ + ": expected an object");
    }

    const Json &at(const std::string &key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ConfigError(where_ + ": missing field '" + key + "'");
        return j_.at(key);
    }

    template <typename T> T get(const std::string &key)
    {
        const Json &v = at(key);
        try
        {
            return v.get<T>();
        }
        catch (const Json::exception &)
        {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    void finish() const
    {
        for (const auto &[key, value] : j_.items())
            if (!seen_.count(key))
                throw ConfigError(where_ + ": unknown field '" + key + "'");
    }

private:
    const Json &j_;
    std::string where_;
    std::set<std::string> seen_;
};

} // namespace

void ScenarioConfig::validate() const
{
    try
    {
        space.validate();
        radio.validate();
        sim.validate();
        traffic().validate();
        if (levels.empty())
            throw ConfigError("levels: at least the level-0 beam is required");
        for (std::size_t l = 0; l < levels.size(); ++l)
        {
            const auto &s = levels[l].size;
            if (s.n_x < space.n_x_min || s.n_x > space.n_x_max || s.n_z < space.n_z_min || s.n_z > space.n_z_max)
                throw ConfigError("levels[" + std::to_string(l) + "]: sub-array outside the element-count bounds");
            if ((l == 0) != (levels[l].split == SplitAxis::none))
                throw ConfigError("levels[" + std::to_string(l) + "]: only level 0 has split 'none'");
        }
    }
    catch (const ConfigError &)
    {
        throw;
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what());
    }
    if (search.grid_points < 1 || search.refine_rounds < 0 || search.steer_points < 3 ||
        search.sidelobe_resolution < 16 || search.quadrature_resolution < 64 ||
        search.audit_sidelobe_resolution < 16)
        throw ConfigError("search: settings out of range");
    if (!(codebook.pixel_m > 0.0) || !(codebook.max_gap_fraction >= 0.0) || codebook.quadrature_resolution < 64)
        throw ConfigError("codebook: settings out of range");
    if (!(isd_m > 0.0) || rings < 0 || !(antenna_height_m > user_height_m) || !(user_height_m >= 0.0) ||
        !(cell_radius_m >= 0.0))
        throw ConfigError("layout: geometry out of range");
    if (m_shapes.empty())
        throw ConfigError("simulation.m_shapes: at least one value is required");
    for (double m : m_shapes)
        if (!(m >= 1.0))
            throw ConfigError("simulation.m_shapes: Nakagami shape must be >= 1");
    if (campaign != "on_off" && campaign != "level_sweep")
        throw ConfigError("simulation.campaign: expected 'on_off' or 'level_sweep'");
    if (replications < 1)
        throw ConfigError("simulation.replications: must be at least 1");
}

std::vector<SubarraySize> ScenarioConfig::optimized_sizes() const
{
    std::vector<SubarraySize> sizes;
    for (std::size_t l = 1; l < levels.size(); ++l)
        sizes.push_back(levels[l].size);
    if (sizes.empty() && !levels.empty())
        sizes.push_back(levels[0].size);
    return sizes;
}

SectorGeometry ScenarioConfig::geometry() const
{
    SectorGeometry g;
    g.antenna_height_m = antenna_height_m;
    g.user_height_m = user_height_m;
    g.region.radius_m = cell_radius_m > 0.0 ? cell_radius_m : isd_m / std::sqrt(3.0);
    return g;
}

NetworkLayout ScenarioConfig::layout() const
{
    return NetworkLayout::hexagonal(isd_m, rings, antenna_height_m);
}

TrafficModel ScenarioConfig::traffic() const
{
    TrafficModel t;
    t.uniform = uniform_intensity;
    t.mean_file_bits = mean_file_bits;
    if (hotspot)
        t.hotspot = Hotspot{{hotspot->range_m * std::cos(hotspot->bearing_rad),
                             hotspot->range_m * std::sin(hotspot->bearing_rad)},
                            hotspot->sigma_m,
                            hotspot->peak};
    return t;
}

std::vector<std::uint64_t> ScenarioConfig::seeds() const
{
    std::vector<std::uint64_t> out;
    for (int i = 0; i < replications; ++i)
        out.push_back(seed + static_cast<std::uint64_t>(i));
    return out;
}

ScenarioConfig preset(const std::string &name)
{
    ScenarioConfig c;
    c.name = name;
    if (name == "mass_event")
    {
        c.space.n_x_max = 12;
        c.space.n_z_max = 32;
        c.space.theta_min = 91.0 * kDeg;
        c.space.theta_max = 105.0 * kDeg;
        c.space.phi_max = 45.0 * kDeg;
        c.levels = {{{2, 4}, SplitAxis::none},
                    {{6, 16}, SplitAxis::azimuth},
                    {{12, 16}, SplitAxis::azimuth},
                    {{12, 32}, SplitAxis::elevation}};
        c.codebook.relaxed = true;
        c.codebook.pixel_m = 5.0;
        c.isd_m = 500.0;
        c.cell_radius_m = c.isd_m / std::sqrt(3.0);
        c.uniform_intensity = 1.0;
        c.hotspot = HotspotConfig{200.0, 15.0 * kDeg, 80.0, 120.0};
        c.m_shapes = {2.0, 5.0, 10.0, kNoFading};
        c.campaign = "on_off";
        c.replications = 2;
        c.output_dir = "out/mass_event";
    }
    else if (name == "rural")
    {
        c.space.n_x_max = 20;
        c.space.n_z_max = 14;
        c.space.theta_min = 91.0 * kDeg;
        c.space.theta_max = 101.0 * kDeg;
        c.space.phi_max = 52.5 * kDeg;
        c.levels = {{{2, 4}, SplitAxis::none},
                    {{5, 14}, SplitAxis::azimuth},
                    {{10, 14}, SplitAxis::azimuth},
                    {{20, 14}, SplitAxis::azimuth}};
        c.codebook.relaxed = false;
        c.codebook.pixel_m = 20.0;
        c.isd_m = 1732.0;
        c.cell_radius_m = c.isd_m / std::sqrt(3.0);
        c.uniform_intensity = 2.5;
        c.hotspot.reset();
        c.m_shapes = {kNoFading};
        c.campaign = "level_sweep";
        c.replications = 1;
        c.output_dir = "out/rural";
    }
    else
        throw ConfigError("unknown preset '" + name + "' (expected mass_event or rural)");
    c.validate();
    return c;
}

Json config_to_json(const ScenarioConfig &c)
{
    Json levels = Json::array();
    for (const auto &l : c.levels)
        levels.push_back({{"n_x", l.size.n_x}, {"n_z", l.size.n_z}, {"split", to_string(l.split)}});
    Json shapes = Json::array();
    for (double m : c.m_shapes)
        shapes.push_back(shape_to_json(m));
    Json hotspot = nullptr;
    if (c.hotspot)
        hotspot = {{"range_m", c.hotspot->range_m},
                   {"bearing_rad", c.hotspot->bearing_rad},
                   {"sigma_m", c.hotspot->sigma_m},
                   {"peak_per_km2", c.hotspot->peak}};
    return {
        {"name", c.name},
        {"design_space",
         {{"n_x_min", c.space.n_x_min},
          {"n_x_max", c.space.n_x_max},
          {"n_z_min", c.space.n_z_min},
          {"n_z_max", c.space.n_z_max},
          {"d_x_max", c.space.d_x_max},
          {"d_z_max", c.space.d_z_max},
          {"theta_min_rad", c.space.theta_min},
          {"theta_max_rad", c.space.theta_max},
          {"phi_max_rad", c.space.phi_max},
          {"sl_threshold_db", c.space.sl_threshold_db}}},
        {"search",
         {{"grid_points", c.search.grid_points},
          {"refine_rounds", c.search.refine_rounds},
          {"steer_points", c.search.steer_points},
          {"sidelobe_resolution", c.search.sidelobe_resolution},
          {"quadrature_resolution", c.search.quadrature_resolution},
          {"audit_sidelobe_resolution", c.search.audit_sidelobe_resolution}}},
        {"levels", levels},
        {"codebook",
         {{"relaxed", c.codebook.relaxed},
          {"pixel_m", c.codebook.pixel_m},
          {"max_gap_fraction", c.codebook.max_gap_fraction},
          {"quadrature_resolution", c.codebook.quadrature_resolution}}},
        {"layout",
         {{"isd_m", c.isd_m},
          {"rings", c.rings},
          {"antenna_height_m", c.antenna_height_m},
          {"user_height_m", c.user_height_m},
          {"cell_radius_m", c.cell_radius_m}}},
        {"traffic",
         {{"uniform_per_km2", c.uniform_intensity}, {"mean_file_bits", c.mean_file_bits}, {"hotspot", hotspot}}},
        {"radio",
         {{"carrier_ghz", c.radio.carrier_ghz},
          {"bandwidth_hz", c.radio.bandwidth_hz},
          {"noise_dbm_per_hz", c.radio.noise_dbm_per_hz},
          {"tx_power_dbm", c.tx_power_dbm},
          {"efficiency", c.radio.efficiency},
          {"se_cap", c.radio.se_cap}}},
        {"simulation",
         {{"horizon_s", c.sim.horizon_s},
          {"warmup_fraction", c.sim.warmup_fraction},
          {"slot_s", c.sim.slot_s},
          {"pf_window_slots", c.sim.pf_window_slots},
          {"shadowing_db", c.sim.shadowing_db},
          {"max_users", c.sim.max_users},
          {"best_server_attachment", c.sim.best_server_attachment},
          {"level_cap", c.sim.level_cap},
          {"m_shapes", shapes},
          {"campaign", c.campaign},
          {"replications", c.replications}}},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
    };
}

ScenarioConfig config_from_json(const Json &input)
{
    if (!input.is_object())
        throw ConfigError("config: expected a JSON object");
    Json j = input;
    if (j.contains("preset"))
    {
        if (!j.at("preset").is_string())
            throw ConfigError("config.preset: expected a string");
        Json base = config_to_json(preset(j.at("preset").get<std::string>()));
        j.erase("preset");
        base.merge_patch(j);
        j = std::move(base);
    }

    ScenarioConfig c;
    Section root(j, "config");
    c.name = root.get<std::string>("name");

    Section ds(root.at("design_space"), "design_space");
    c.space.n_x_min = ds.get<int>("n_x_min");
    c.space.n_x_max = ds.get<int>("n_x_max");
    c.space.n_z_min = ds.get<int>("n_z_min");
    c.space.n_z_max = ds.get<int>("n_z_max");
    c.space.d_x_max = ds.get<double>("d_x_max");
    c.space.d_z_max = ds.get<double>("d_z_max");
    c.space.theta_min = ds.get<double>("theta_min_rad");
    c.space.theta_max = ds.get<double>("theta_max_rad");
    c.space.phi_max = ds.get<double>("phi_max_rad");
    c.space.sl_threshold_db = ds.get<double>("sl_threshold_db");
    ds.finish();

    Section se(root.at("search"), "search");
    c.search.grid_points = se.get<int>("grid_points");
    c.search.refine_rounds = se.get<int>("refine_rounds");
    c.search.steer_points = se.get<int>("steer_points");
    c.search.sidelobe_resolution = se.get<int>("sidelobe_resolution");
    c.search.quadrature_resolution = se.get<int>("quadrature_resolution");
    c.search.audit_sidelobe_resolution = se.get<int>("audit_sidelobe_resolution");
    se.finish();

    const Json &levels = root.at("levels");
    if (!levels.is_array())
        throw ConfigError("levels: expected an array");
    for (std::size_t i = 0; i < levels.size(); ++i)
    {
        Section ls(levels[i], "levels[" + std::to_string(i) + "]");
        LevelSpec spec;
        spec.size.n_x = ls.get<int>("n_x");
        spec.size.n_z = ls.get<int>("n_z");
        try
        {
            spec.split = split_axis_from_string(ls.get<std::string>("split"));
        }
        catch (const ConfigError &)
        {
            throw;
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError("levels[" + std::to_string(i) + "]: " + e.what());
        }
        ls.finish();
        c.levels.push_back(spec);
    }

    Section cb(root.at("codebook"), "codebook");
    c.codebook.relaxed = cb.get<bool>("relaxed");
    c.codebook.pixel_m = cb.get<double>("pixel_m");
    c.codebook.max_gap_fraction = cb.get<double>("max_gap_fraction");
    c.codebook.quadrature_resolution = cb.get<int>("quadrature_resolution");
    cb.finish();

    Section lay(root.at("layout"), "layout");
    c.isd_m = lay.get<double>("isd_m");
    c.rings = lay.get<int>("rings");
    c.antenna_height_m = lay.get<double>("antenna_height_m");
    c.user_height_m = lay.get<double>("user_height_m");
    c.cell_radius_m = lay.get<double>("cell_radius_m");
    lay.finish();

    Section tr(root.at("traffic"), "traffic");
    c.uniform_intensity = tr.get<double>("uniform_per_km2");
    c.mean_file_bits = tr.get<double>("mean_file_bits");
    // An absent hotspot is the same as null; a merge patch with null removes the key.
    const Json hs = j.at("traffic").contains("hotspot") ? tr.at("hotspot") : Json(nullptr);
    if (!hs.is_null())
    {
        Section h(hs, "traffic.hotspot");
        HotspotConfig cfg;
        cfg.range_m = h.get<double>("range_m");
        cfg.bearing_rad = h.get<double>("bearing_rad");
        cfg.sigma_m = h.get<double>("sigma_m");
        cfg.peak = h.get<double>("peak_per_km2");
        h.finish();
        c.hotspot = cfg;
    }
    tr.finish();

    Section ra(root.at("radio"), "radio");
    c.radio.carrier_ghz = ra.get<double>("carrier_ghz");
    c.radio.bandwidth_hz = ra.get<double>("bandwidth_hz");
    c.radio.noise_dbm_per_hz = ra.get<double>("noise_dbm_per_hz");
    c.tx_power_dbm = ra.get<double>("tx_power_dbm");
    c.radio.tx_power_w = from_db(c.tx_power_dbm - 30.0);
    c.radio.efficiency = ra.get<double>("efficiency");
    c.radio.se_cap = ra.get<double>("se_cap");
    ra.finish();

    Section si(root.at("simulation"), "simulation");
    c.sim.horizon_s = si.get<double>("horizon_s");
    c.sim.warmup_fraction = si.get<double>("warmup_fraction");
    c.sim.slot_s = si.get<double>("slot_s");
    c.sim.pf_window_slots = si.get<double>("pf_window_slots");
    c.sim.shadowing_db = si.get<double>("shadowing_db");
    c.sim.max_users = si.get<std::size_t>("max_users");
    c.sim.best_server_attachment = si.get<bool>("best_server_attachment");
    c.sim.level_cap = si.get<int>("level_cap");
    c.m_shapes.clear();
    const Json &shapes = si.at("m_shapes");
    if (!shapes.is_array())
        throw ConfigError("simulation.m_shapes: expected an array");
    for (const auto &m : shapes)
    {
        try
        {
            c.m_shapes.push_back(shape_from_json(m));
        }
        catch (const std::exception &e)
        {
            throw ConfigError(std::string("simulation.m_shapes: ") + e.what());
        }
    }
    c.campaign = si.get<std::string>("campaign");
    c.replications = si.get<int>("replications");
    si.finish();

    c.seed = root.get<std::uint64_t>("seed");
    c.output_dir = root.get<std::string>("output_dir");
    root.finish();

    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path &path)
{
    Json j;
    try
    {
        j = read_json_file(path);
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what());
    }
    return config_from_json(j);
}

} // namespace beamsim
