// SPDX-License-Identifier: Apache-2.0

#include "beamsim/optimizer.hpp"

#include "beamsim/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace beamsim
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGainTieDb = 1e-9;
constexpr double kMinTaper = 0.02;

struct Candidate
{
    std::array<double, 4> x{};  // d_x, d_z, alpha_x, alpha_z
    double gain_db = -kInf;
};

ArrayDesign full_array(const DesignSpace &space, const std::array<double, 4> &x)
{
    return ArrayDesign{space.n_x_max, space.n_z_max, x[0], x[1], x[2], x[3]};
}

// Strict "a is preferred over b": higher gain, then smaller d_z, then smaller d_x.
bool preferred(const Candidate &a, const Candidate &b)
{
    if (std::abs(a.gain_db - b.gain_db) > kGainTieDb)
        return a.gain_db > b.gain_db;
    if (a.x[1] != b.x[1])
        return a.x[1] < b.x[1];
    return a.x[0] < b.x[0];
}

// Taper ratios are spaced geometrically: side-lobe depth responds to log(alpha).
double taper_level(int k, int g)
{
    if (g == 1)
        return 1.0;
    return std::pow(kMinTaper, 1.0 - static_cast<double>(k) / (g - 1));
}

} // namespace

void DesignSpace::validate() const
{
    if (n_x_min < 1 || n_z_min < 1 || n_x_min > n_x_max || n_z_min > n_z_max)
        throw std::invalid_argument("DesignSpace: element-count bounds out of order");
    if (!(d_x_max > 0.0) || !(d_z_max > 0.0))
        throw std::invalid_argument("DesignSpace: spacing bounds must be positive");
    if (!(theta_min <= theta_max) || theta_min < 0.0 || theta_max > std::numbers::pi)
        throw std::invalid_argument("DesignSpace: elevation steering range out of order");
    if (!(phi_max >= 0.0 && phi_max <= 0.5 * std::numbers::pi))
        throw std::invalid_argument("DesignSpace: phi_max must lie in [0, pi/2]");
    if (!(sl_threshold_db >= 0.0))
        throw std::invalid_argument("DesignSpace: side-lobe threshold must be non-negative");
}

SteeringAngles DesignSpace::objective_steer() const
{
    return {0.5 * (theta_min + theta_max), 0.0};
}

std::vector<SteeringAngles> DesignSpace::steering_grid(int points_per_axis) const
{
    if (points_per_axis < 1)
        throw std::invalid_argument("steering_grid: need at least one point per axis");
    std::vector<SteeringAngles> grid;
    grid.reserve(static_cast<std::size_t>(points_per_axis * points_per_axis));
    auto lerp = [points_per_axis](double lo, double hi, int k) {
        if (points_per_axis == 1)
            return 0.5 * (lo + hi);
        return lo + (hi - lo) * k / (points_per_axis - 1);
    };
    for (int i = 0; i < points_per_axis; ++i)
        for (int j = 0; j < points_per_axis; ++j)
            grid.push_back({lerp(theta_min, theta_max, i), lerp(-phi_max, phi_max, j)});
    return grid;
}

FeasibilityResult check_feasibility(const ArrayDesign &candidate, const DesignSpace &space,
                                    std::span<const SubarraySize> level_sizes, int steer_points,
                                    int sidelobe_resolution, bool stop_at_violation)
{
    if (steer_points < 3)
        throw std::invalid_argument("check_feasibility: need at least a 3x3 steering grid");
    const auto grid = space.steering_grid(steer_points);
    FeasibilityResult result{true, kInf};
    for (const auto &size : level_sizes)
    {
        const ArrayDesign sub = candidate.with_size(size.n_x, size.n_z);
        for (const auto &steer : grid)
        {
            const auto sl = sidelobe_level_db(sub, steer, sidelobe_resolution);
            if (!sl)
                continue;
            result.worst_sidelobe_db = std::min(result.worst_sidelobe_db, *sl);
            if (*sl < space.sl_threshold_db)
            {
                result.feasible = false;
                if (stop_at_violation)
                    return result;
            }
        }
    }
    return result;
}

FeasibilityResult audit_design(const ArrayDesign &design, const DesignSpace &space,
                               std::span<const SubarraySize> level_sizes, const SearchSettings &settings)
{
    return check_feasibility(design, space, level_sizes, 2 * settings.steer_points - 1,
                             settings.audit_sidelobe_resolution, false);
}

OptimizedDesign optimize(const DesignSpace &space, std::span<const SubarraySize> level_sizes,
                         const SearchSettings &settings, OptimizerTrace *trace)
{
    space.validate();
    if (level_sizes.empty())
        throw std::invalid_argument("optimize: level_sizes must not be empty");
    for (const auto &s : level_sizes)
        if (s.n_x < space.n_x_min || s.n_x > space.n_x_max || s.n_z < space.n_z_min || s.n_z > space.n_z_max)
            throw std::invalid_argument("optimize: level size outside the element-count bounds");
    if (settings.grid_points < 1 || settings.refine_rounds < 0)
        throw std::invalid_argument("optimize: bad search settings");

    const SteeringAngles objective = space.objective_steer();
    const int g = settings.grid_points;
    auto gain_of = [&](const std::array<double, 4> &x) {
        return to_db(peak_gain_g0(full_array(space, x), objective, settings.quadrature_resolution));
    };
    int checks = 0;
    auto feasible = [&](const std::array<double, 4> &x) {
        ++checks;
        return check_feasibility(full_array(space, x), space, level_sizes, settings.steer_points,
                                 settings.sidelobe_resolution, true)
            .feasible;
    };

    // Coarse full-factorial grid, row-major over (d_x, d_z, alpha_x, alpha_z).
    const std::size_t total = static_cast<std::size_t>(g) * g * g * g;
    std::vector<Candidate> grid(total);
    for (std::size_t idx = 0; idx < total; ++idx)
    {
        std::size_t r = idx;
        std::array<int, 4> k{};
        for (int axis = 3; axis >= 0; --axis)
        {
            k[static_cast<std::size_t>(axis)] = static_cast<int>(r % static_cast<std::size_t>(g));
            r /= static_cast<std::size_t>(g);
        }
        grid[idx].x = {space.d_x_max * (k[0] + 1) / g, space.d_z_max * (k[1] + 1) / g, taper_level(k[2], g),
                       taper_level(k[3], g)};
    }
    parallel_for(total, [&](std::size_t i) { grid[i].gain_db = gain_of(grid[i].x); });

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return preferred(grid[a], grid[b]); });

    // Rejection: the first feasible candidate in preference order is the grid optimum.
    const Candidate *start = nullptr;
    for (std::size_t i : order)
        if (feasible(grid[i].x))
        {
            start = &grid[i];
            break;
        }
    if (!start)
        throw InfeasibleError("optimize: no grid design meets the " + std::to_string(space.sl_threshold_db) +
                              " dB side-lobe constraint");

    Candidate best = *start;
    const double grid_best_gain = best.gain_db;

    // Coordinate descent with step halving around the grid optimum.
    const std::array<double, 4> upper{space.d_x_max, space.d_z_max, 1.0, 1.0};
    const std::array<double, 4> lower{space.d_x_max / (4.0 * g), space.d_z_max / (4.0 * g), 0.5 * kMinTaper,
                                      0.5 * kMinTaper};
    // Taper steps act on log(alpha).
    std::array<double, 4> step{space.d_x_max / g / 2.0, space.d_z_max / g / 2.0, 0.0, 0.0};
    step[2] = step[3] = g > 1 ? -std::log(kMinTaper) / (g - 1) / 2.0 : 0.5;
    for (int round = 0; round < settings.refine_rounds; ++round)
    {
        for (int sweep = 0; sweep < 16; ++sweep)
        {
            bool improved = false;
            for (std::size_t axis = 0; axis < 4; ++axis)
                for (double sign : {+1.0, -1.0})
                {
                    Candidate trial = best;
                    const double moved = axis < 2 ? best.x[axis] + sign * step[axis]
                                                  : best.x[axis] * std::exp(sign * step[axis]);
                    trial.x[axis] = std::clamp(moved, lower[axis], upper[axis]);
                    if (trial.x[axis] == best.x[axis])
                        continue;
                    trial.gain_db = gain_of(trial.x);
                    if (preferred(trial, best) && feasible(trial.x))
                    {
                        best = trial;
                        improved = true;
                    }
                }
            if (!improved)
                break;
        }
        for (double &s : step)
            s *= 0.5;
    }

    OptimizedDesign out;
    out.design = full_array(space, best.x);
    out.achieved_gain_db = to_db(peak_gain_g0(out.design, objective));
    out.worst_sidelobe_db = check_feasibility(out.design, space, level_sizes, settings.steer_points,
                                              settings.sidelobe_resolution, false)
                                .worst_sidelobe_db;
    out.feasible = out.worst_sidelobe_db >= space.sl_threshold_db;

    if (trace)
    {
        trace->best_grid_gain_db = grid_best_gain;
        trace->grid_candidates = static_cast<int>(total);
        trace->feasibility_checks = checks;
    }
    return out;
}

} // namespace beamsim
