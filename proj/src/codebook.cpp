// SPDX-License-Identifier: Apache-2.0

#include "beamsim/codebook.hpp"

#include "beamsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace beamsim
{

namespace
{

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Upper (towards the horizon) half-power point of the elevation cut at phi = 0.
double upper_half_power_theta(const BeamPattern &pattern)
{
    constexpr int kSamples = 7200;
    const double step = std::numbers::pi / kSamples;
    std::vector<double> cut(kSamples + 1);
    for (int i = 0; i <= kSamples; ++i)
        cut[static_cast<std::size_t>(i)] = pattern.normalized({i * step, 0.0});
    const auto peak = static_cast<int>(std::max_element(cut.begin(), cut.end()) - cut.begin());
    const double half = 0.5 * cut[static_cast<std::size_t>(peak)];
    for (int i = peak; i > 0; --i)
    {
        const double hi = cut[static_cast<std::size_t>(i)], lo = cut[static_cast<std::size_t>(i - 1)];
        if (lo <= half)
            return (i - 1 + (half - lo) / (hi - lo)) * step;
    }
    return 0.0;
}

// Centroid range of the annular wedge between two ranges with azimuth half-width beta.
double wedge_centroid_range(double r_near, double r_far, double beta)
{
    const double radial = 2.0 / 3.0 * (r_far * r_far * r_far - r_near * r_near * r_near) /
                          (r_far * r_far - r_near * r_near);
    return beta > 0.0 ? radial * std::sin(beta) / beta : radial;
}

SteeringAngles steer_for_region(const AngularRegion &region, const SectorGeometry &geometry, const DesignSpace &space)
{
    const double r_far = geometry.range_at_depression(region.depression_lo);
    const double r_near = region.depression_hi >= kHalfPi ? 0.0 : geometry.range_at_depression(region.depression_hi);
    const double beta = 0.5 * (region.azimuth_hi - region.azimuth_lo);
    const double r_c = wedge_centroid_range(r_near, r_far, beta);
    SteeringAngles s;
    s.theta_e = std::clamp(kHalfPi + std::atan2(geometry.height_difference(), r_c), space.theta_min, space.theta_max);
    s.phi_e = std::clamp(0.5 * (region.azimuth_lo + region.azimuth_hi), -space.phi_max, space.phi_max);
    return s;
}

std::pair<AngularRegion, AngularRegion> split_region(const AngularRegion &r, SplitAxis axis)
{
    AngularRegion a = r, b = r;
    if (axis == SplitAxis::azimuth)
    {
        const double mid = 0.5 * (r.azimuth_lo + r.azimuth_hi);
        a.azimuth_hi = mid;
        b.azimuth_lo = mid;
    }
    else if (axis == SplitAxis::elevation)
    {
        // Far half first.
        const double mid = 0.5 * (r.depression_lo + r.depression_hi);
        a.depression_hi = mid;
        b.depression_lo = mid;
    }
    else
        throw std::invalid_argument("split_region: levels above 0 need a split axis");
    return {a, b};
}

SteeringAngles quantized(SteeringAngles s)
{
    return {round_significant(s.theta_e, 9), round_significant(s.phi_e, 9)};
}

void validate_levels(const std::vector<LevelSpec> &levels)
{
    if (levels.empty())
        throw std::invalid_argument("codebook: at least the level-0 spec is required");
    for (std::size_t l = 1; l < levels.size(); ++l)
        if (levels[l].split == SplitAxis::none)
            throw std::invalid_argument("codebook: level " + std::to_string(l) + " has no split axis");
    for (const auto &spec : levels)
        if (spec.size.n_x < 1 || spec.size.n_z < 1)
            throw std::invalid_argument("codebook: sub-array sizes must be positive");
}

} // namespace

std::string to_string(SplitAxis axis)
{
    switch (axis)
    {
    case SplitAxis::azimuth:
        return "azimuth";
    case SplitAxis::elevation:
        return "elevation";
    default:
        return "none";
    }
}

SplitAxis split_axis_from_string(const std::string &name)
{
    if (name == "azimuth")
        return SplitAxis::azimuth;
    if (name == "elevation")
        return SplitAxis::elevation;
    if (name == "none")
        return SplitAxis::none;
    throw std::invalid_argument("unknown split axis '" + name + "'");
}

double round_significant(double value, int digits)
{
    if (value == 0.0 || !std::isfinite(value))
        return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    return std::strtod(buf, nullptr);
}

std::optional<std::pair<int, int>> CoverageRaster::pixel_of(Vec2 p) const
{
    const int ix = static_cast<int>(std::floor((p.x - origin_x) / cell_m));
    const int iy = static_cast<int>(std::floor((p.y - origin_y) / cell_m));
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny)
        return std::nullopt;
    return std::pair{ix, iy};
}

int CoverageRaster::owner_at(Vec2 p) const
{
    const auto px = pixel_of(p);
    if (!px)
        return -1;
    return owner[static_cast<std::size_t>(px->second * nx + px->first)];
}

std::size_t CoverageRaster::inside_count() const
{
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), char{1}));
}

SteeringAngles wide_beam_steering(const ArrayDesign &design, const SectorGeometry &geometry)
{
    const double edge_theta = kHalfPi + geometry.depression(geometry.region.radius_m);
    auto upper_point = [&](double theta_e) { return upper_half_power_theta(BeamPattern(design, {theta_e, 0.0})); };
    // Monotone bracket; steeper tilts let the image grating lobe take over the cut.
    double lo = kHalfPi, hi = kHalfPi + 0.45;
    if (upper_point(lo) >= edge_theta)
        return {lo, 0.0};
    if (upper_point(hi) <= edge_theta)
        return {hi, 0.0};
    for (int it = 0; it < 60; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (upper_point(mid) < edge_theta ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), 0.0};
}

void Codebook::compute_gains()
{
    gains_.clear();
    gains_.reserve(beams_.size());
    std::vector<double> g0(beams_.size());
    parallel_for(beams_.size(), [&](std::size_t i) {
        const auto &b = beams_[i];
        g0[i] = peak_gain_g0(design_.design.with_size(b.subarray.n_x, b.subarray.n_z), b.steer,
                             options_.quadrature_resolution);
    });
    for (std::size_t i = 0; i < beams_.size(); ++i)
    {
        auto &b = beams_[i];
        gains_.emplace_back(design_.design.with_size(b.subarray.n_x, b.subarray.n_z), b.steer, g0[i]);
        b.peak_gain_db = to_db(g0[i]);
    }
}

void Codebook::compute_rasters()
{
    const BoundingBox box = geometry_.region.bounding_box();
    CoverageRaster base;
    base.cell_m = options_.pixel_m;
    base.origin_x = box.x_min;
    base.origin_y = box.y_min;
    base.nx = static_cast<int>(std::ceil((box.x_max - box.x_min) / base.cell_m));
    base.ny = static_cast<int>(std::ceil((box.y_max - box.y_min) / base.cell_m));
    const std::size_t npix = static_cast<std::size_t>(base.nx) * static_cast<std::size_t>(base.ny);
    base.inside.assign(npix, 0);
    base.owner.assign(npix, -1);
    std::vector<Direction> dirs(npix);
    for (int iy = 0; iy < base.ny; ++iy)
        for (int ix = 0; ix < base.nx; ++ix)
        {
            const std::size_t k = static_cast<std::size_t>(iy * base.nx + ix);
            const Vec2 c = base.center(ix, iy);
            base.inside[k] = geometry_.region.contains(c) ? 1 : 0;
            dirs[k] = geometry_.direction_to(c);
        }
    const std::size_t inside = base.inside_count();
    if (inside == 0)
        throw CoverageError("codebook: the sector contains no raster pixel");

    rasters_.assign(levels_.size(), base);
    gap_pixels_.assign(levels_.size(), 0);
    for (std::size_t l = 0; l < levels_.size(); ++l)
    {
        auto &raster = rasters_[l];
        std::vector<char> gap(npix, 0);
        const CoverageRaster *previous = l > 0 ? &rasters_[l - 1] : nullptr;
        parallel_for(npix, [&](std::size_t k) {
            if (!raster.inside[k])
                return;
            const std::vector<int> *candidates = &levels_[l];
            if (previous && !options_.relaxed)
            {
                const int parent = previous->owner[k];
                if (parent < 0)
                    return;
                candidates = &beams_[static_cast<std::size_t>(parent)].children;
            }
            int best = -1;
            double best_gain = -1.0;
            for (int id : *candidates)
            {
                const double g = gains_[static_cast<std::size_t>(id)].linear(dirs[k]);
                if (g > best_gain)
                {
                    best_gain = g;
                    best = id;
                }
            }
            raster.owner[k] = best;
            gap[k] = best < 0 || !(best_gain > 0.0);
        });
        gap_pixels_[l] = static_cast<std::size_t>(std::count(gap.begin(), gap.end(), char{1}));
        if (static_cast<double>(gap_pixels_[l]) > options_.max_gap_fraction * static_cast<double>(inside))
            throw CoverageError("codebook: level " + std::to_string(l) + " leaves " +
                                std::to_string(gap_pixels_[l]) + " of " + std::to_string(inside) +
                                " sector pixels without radiation");
    }
}

std::vector<std::pair<int, int>> Codebook::coverage(int id) const
{
    const Beam &b = beam(id);
    const CoverageRaster &r = raster(b.level);
    std::vector<std::pair<int, int>> pixels;
    for (int iy = 0; iy < r.ny; ++iy)
        for (int ix = 0; ix < r.nx; ++ix)
            if (r.owner[static_cast<std::size_t>(iy * r.nx + ix)] == id)
                pixels.emplace_back(ix, iy);
    return pixels;
}

InclusionReport Codebook::inclusion() const
{
    InclusionReport report;
    for (std::size_t l = 1; l < rasters_.size(); ++l)
    {
        const auto &child = rasters_[l].owner;
        const auto &parent = rasters_[l - 1].owner;
        for (std::size_t k = 0; k < child.size(); ++k)
        {
            if (child[k] < 0)
                continue;
            ++report.checked_pixels;
            if (beams_[static_cast<std::size_t>(child[k])].parent != parent[k])
                ++report.violating_pixels;
        }
    }
    return report;
}

Codebook assemble_codebook(const OptimizedDesign &design, const SectorGeometry &geometry,
                           const std::vector<LevelSpec> &levels, std::vector<Beam> beams,
                           const CodebookOptions &options)
{
    validate_levels(levels);
    if (!(options.pixel_m > 0.0) || options.max_gap_fraction < 0.0)
        throw std::invalid_argument("codebook: bad raster options");
    Codebook cb;
    cb.design_ = design;
    cb.geometry_ = geometry;
    cb.specs_ = levels;
    cb.options_ = options;
    cb.levels_.assign(levels.size(), {});
    for (std::size_t i = 0; i < beams.size(); ++i)
    {
        const Beam &b = beams[i];
        if (b.id != static_cast<int>(i))
            throw std::invalid_argument("codebook: beam ids must be contiguous from 0");
        if (b.level < 0 || b.level >= static_cast<int>(levels.size()))
            throw std::invalid_argument("codebook: beam level out of range");
        if (b.subarray != levels[static_cast<std::size_t>(b.level)].size)
            throw std::invalid_argument("codebook: beam sub-array differs from its level");
        if ((b.level == 0) != !b.parent.has_value())
            throw std::invalid_argument("codebook: only level-0 beams lack a parent");
        if (b.parent)
        {
            if (*b.parent < 0 || *b.parent >= static_cast<int>(i))
                throw std::invalid_argument("codebook: parent must precede its child");
            const Beam &p = beams[static_cast<std::size_t>(*b.parent)];
            if (p.level != b.level - 1 || std::find(p.children.begin(), p.children.end(), b.id) == p.children.end())
                throw std::invalid_argument("codebook: inconsistent parent/child links");
        }
        if (!b.children.empty() && b.children.size() != 2)
            throw std::invalid_argument("codebook: a beam has either 0 or 2 children");
        cb.levels_[static_cast<std::size_t>(b.level)].push_back(b.id);
    }
    if (cb.levels_[0].size() != 1)
        throw std::invalid_argument("codebook: level 0 must hold exactly one beam");
    cb.beams_ = std::move(beams);
    cb.compute_gains();
    cb.compute_rasters();
    return cb;
}

Codebook build_codebook(const OptimizedDesign &design, const SectorGeometry &geometry,
                        const std::vector<LevelSpec> &levels, const DesignSpace &space, const CodebookOptions &options)
{
    validate_levels(levels);
    const double edge_depression = geometry.depression(geometry.region.radius_m);
    const double half_span = 0.5 * geometry.region.azimuth_span_rad;

    std::vector<Beam> beams;
    Beam root;
    root.id = 0;
    root.level = 0;
    root.index = 1;
    root.subarray = levels[0].size;
    root.steer = quantized(wide_beam_steering(design.design.with_size(root.subarray.n_x, root.subarray.n_z), geometry));
    root.target = {-half_span, half_span, edge_depression, kHalfPi};
    beams.push_back(root);

    // Children only aim inside the steering box in elevation.
    const double box_lo = std::max(edge_depression, space.theta_min - kHalfPi);
    const double box_hi = std::min(kHalfPi, std::max(box_lo, space.theta_max - kHalfPi));
    std::vector<int> previous{0};
    for (std::size_t l = 1; l < levels.size(); ++l)
    {
        std::vector<int> current;
        int index = 1;
        for (int parent_id : previous)
        {
            AngularRegion region = beams[static_cast<std::size_t>(parent_id)].target;
            region.depression_lo = std::clamp(region.depression_lo, box_lo, box_hi);
            region.depression_hi = std::clamp(region.depression_hi, box_lo, box_hi);
            const auto [a, b] = split_region(region, levels[l].split);
            for (const AngularRegion &child_region : {a, b})
            {
                Beam child;
                child.id = static_cast<int>(beams.size());
                child.level = static_cast<int>(l);
                child.index = index++;
                child.subarray = levels[l].size;
                child.steer = quantized(steer_for_region(child_region, geometry, space));
                child.parent = parent_id;
                child.target = child_region;
                beams[static_cast<std::size_t>(parent_id)].children.push_back(child.id);
                current.push_back(child.id);
                beams.push_back(child);
            }
        }
        previous = std::move(current);
    }

    Codebook cb = assemble_codebook(design, geometry, levels, beams, options);

    // Drop sibling pairs that are both empty leaves, deepest level first.
    std::vector<char> removed(beams.size(), 0);
    std::vector<std::size_t> pixels(beams.size(), 0);
    for (std::size_t l = 0; l < cb.rasters_.size(); ++l)
        for (int id : cb.rasters_[l].owner)
            if (id >= 0)
                ++pixels[static_cast<std::size_t>(id)];
    bool pruned = false;
    for (int l = cb.depth() - 1; l >= 0; --l)
        for (int pid : cb.levels_[static_cast<std::size_t>(l)])
        {
            auto &p = beams[static_cast<std::size_t>(pid)];
            if (p.children.size() != 2)
                continue;
            const auto c0 = static_cast<std::size_t>(p.children[0]), c1 = static_cast<std::size_t>(p.children[1]);
            if (pixels[c0] == 0 && pixels[c1] == 0 && beams[c0].children.empty() && beams[c1].children.empty())
            {
                removed[c0] = removed[c1] = 1;
                p.children.clear();
                pruned = true;
            }
        }
    if (!pruned)
        return cb;

    std::vector<int> remap(beams.size(), -1);
    std::vector<Beam> kept;
    std::vector<int> next_index(levels.size(), 1);
    for (const auto &b : beams)
        if (!removed[static_cast<std::size_t>(b.id)])
        {
            remap[static_cast<std::size_t>(b.id)] = static_cast<int>(kept.size());
            kept.push_back(b);
        }
    for (auto &b : kept)
    {
        b.id = remap[static_cast<std::size_t>(b.id)];
        b.index = next_index[static_cast<std::size_t>(b.level)]++;
        if (b.parent)
            b.parent = remap[static_cast<std::size_t>(*b.parent)];
        for (int &c : b.children)
            c = remap[static_cast<std::size_t>(c)];
    }
    return assemble_codebook(design, geometry, levels, std::move(kept), options);
}

SelectionStep select_beam_step(const Codebook &codebook, int current_best, double current_best_sinr, int cursor,
                               const SinrProbe &sinr_of, int level_cap)
{
    SelectionStep step{current_best, current_best_sinr, std::nullopt, 0};
    const Beam &c = codebook.beam(cursor);
    if (c.children.empty() || (level_cap >= 0 && c.level >= level_cap))
        return step;

    int best_child = -1;
    double best_child_sinr = 0.0;
    for (int child : c.children)
    {
        const double s = sinr_of(child);
        ++step.probes;
        if (best_child < 0 || s > best_child_sinr)
        {
            best_child = child;
            best_child_sinr = s;
        }
    }
    auto can_descend = [&](int id) {
        const Beam &b = codebook.beam(id);
        return !b.children.empty() && !(level_cap >= 0 && b.level >= level_cap);
    };
    if (best_child_sinr > current_best_sinr)
    {
        step.new_best = best_child;
        step.new_best_sinr = best_child_sinr;
        if (can_descend(best_child))
            step.next_cursor = best_child;
    }
    else if (codebook.relaxed() && can_descend(best_child))
        step.next_cursor = best_child;
    return step;
}

BeamSearchResult beam_search(const Codebook &codebook, const SinrProbe &sinr_of, int level_cap)
{
    BeamSearchResult result;
    result.best = codebook.root();
    double best_sinr = sinr_of(result.best);
    result.probes = 1;
    result.best_trace.push_back(result.best);
    result.best_sinr_trace.push_back(best_sinr);
    std::optional<int> cursor = codebook.root();
    while (cursor)
    {
        const auto step = select_beam_step(codebook, result.best, best_sinr, *cursor, sinr_of, level_cap);
        if (step.probes == 0)
            break;
        result.probes += step.probes;
        result.best = step.new_best;
        best_sinr = step.new_best_sinr;
        result.best_trace.push_back(result.best);
        result.best_sinr_trace.push_back(best_sinr);
        cursor = step.next_cursor;
    }
    return result;
}

} // namespace beamsim
