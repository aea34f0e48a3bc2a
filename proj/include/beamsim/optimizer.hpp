// SPDX-License-Identifier: Apache-2.0
//
// Constrained array design: maximize the full-array peak gain over spacings and
// taper ratios while every codebook sub-array keeps its side lobes at least
// sl_threshold_db below the main lobe across the steering box.

#pragma once

#include "beamsim/antenna.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace beamsim
{

class InfeasibleError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct SubarraySize
{
    int n_x = 1;
    int n_z = 1;

    bool operator==(const SubarraySize &) const = default;
};

struct DesignSpace
{
    int n_x_min = 1;
    int n_x_max = 12;
    int n_z_min = 1;
    int n_z_max = 32;
    double d_x_max = 0.5;
    double d_z_max = 0.7;
    double theta_min = 1.5707963267948966;  // radians, from zenith
    double theta_max = 1.8325957145940461;
    double phi_max = 0.7853981633974483;
    double sl_threshold_db = 30.0;

    void validate() const;

    // Steering at which the objective gain is measured: center of the elevation
    // range, azimuth zero.
    SteeringAngles objective_steer() const;

    // Uniform grid of steering angles spanning the box, points_per_axis^2 entries.
    std::vector<SteeringAngles> steering_grid(int points_per_axis) const;
};

struct OptimizedDesign
{
    ArrayDesign design;
    double achieved_gain_db = 0.0;
    double worst_sidelobe_db = 0.0;
    bool feasible = false;
};

struct FeasibilityResult
{
    bool feasible = false;
    double worst_sidelobe_db = 0.0;  // +inf when no checked pattern has side lobes
};

struct SearchSettings
{
    int grid_points = 8;            // per design variable
    int refine_rounds = 3;          // coordinate-descent step halvings
    int steer_points = 5;           // per steering axis during the search
    int sidelobe_resolution = 256;  // direction-cosine grid per axis
    int quadrature_resolution = 256;
    int audit_sidelobe_resolution = 512;
};

// Side-lobe check of every level size at steer_points x steer_points steering
// angles. With stop_at_violation the scan returns on the first failing pattern.
FeasibilityResult check_feasibility(const ArrayDesign &candidate, const DesignSpace &space,
                                    std::span<const SubarraySize> level_sizes, int steer_points = 5,
                                    int sidelobe_resolution = 512, bool stop_at_violation = false);

// Same check on a steering grid twice as dense as the search grid and at the
// audit resolution.
FeasibilityResult audit_design(const ArrayDesign &design, const DesignSpace &space,
                               std::span<const SubarraySize> level_sizes, const SearchSettings &settings = {});

struct OptimizerTrace
{
    // Best feasible gain seen on the coarse grid (search resolution).
    double best_grid_gain_db = 0.0;
    int grid_candidates = 0;
    int feasibility_checks = 0;
};

// Throws InfeasibleError when no grid point satisfies the side-lobe constraint.
OptimizedDesign optimize(const DesignSpace &space, std::span<const SubarraySize> level_sizes,
                         const SearchSettings &settings = {}, OptimizerTrace *trace = nullptr);

} // namespace beamsim
