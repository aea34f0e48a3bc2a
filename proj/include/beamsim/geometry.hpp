// SPDX-License-Identifier: Apache-2.0
//
// Flat-ground geometry shared by the codebook, channel and simulator. Ground
// coordinates are meters in the frame of the beamformed site: origin at the
// mast, +x along the beamformed sector's boresight.

#pragma once

#include "beamsim/antenna.hpp"

#include <cmath>

namespace beamsim
{

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2 &) const = default;
};

inline double norm(Vec2 v)
{
    return std::hypot(v.x, v.y);
}

struct BoundingBox
{
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;

    double area() const { return (x_max - x_min) * (y_max - y_min); }
};

// Pie-slice sector footprint centered on the +x axis.
struct SectorRegion
{
    double radius_m = 1000.0;
    double azimuth_span_rad = 2.0943951023931957;  // 120 deg

    bool contains(Vec2 p) const;
    double area_m2() const { return 0.5 * azimuth_span_rad * radius_m * radius_m; }
    BoundingBox bounding_box() const;
};

struct SectorGeometry
{
    double antenna_height_m = 30.0;
    double user_height_m = 1.5;
    SectorRegion region;

    double height_difference() const { return antenna_height_m - user_height_m; }

    // Direction from a mast at `mast` with boresight azimuth `boresight_rad`
    // towards a ground user, expressed in the array's (theta, phi) frame.
    Direction direction_to(Vec2 mast, double boresight_rad, Vec2 user) const;
    Direction direction_to(Vec2 user) const { return direction_to({0.0, 0.0}, 0.0, user); }

    double distance_3d(Vec2 mast, Vec2 user) const;

    // Depression angle below the horizon of a ground point at range r.
    double depression(double range_m) const { return std::atan2(height_difference(), range_m); }
    double range_at_depression(double depression_rad) const
    {
        return height_difference() / std::tan(depression_rad);
    }
};

} // namespace beamsim
