// SPDX-License-Identifier: Apache-2.0

#include "beamsim/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace beamsim
{

bool SectorRegion::contains(Vec2 p) const
{
    const double r = norm(p);
    if (r > radius_m)
        return false;
    if (r == 0.0)
        return true;
    return std::abs(std::atan2(p.y, p.x)) <= 0.5 * azimuth_span_rad;
}

BoundingBox SectorRegion::bounding_box() const
{
    const double half = 0.5 * azimuth_span_rad;
    BoundingBox box{0.0, 0.0, 0.0, 0.0};
    auto include = [&box](double x, double y) {
        box.x_min = std::min(box.x_min, x);
        box.x_max = std::max(box.x_max, x);
        box.y_min = std::min(box.y_min, y);
        box.y_max = std::max(box.y_max, y);
    };
    include(radius_m * std::cos(half), radius_m * std::sin(half));
    include(radius_m * std::cos(half), -radius_m * std::sin(half));
    // Arc extremes that fall inside the wedge.
    for (double a : {0.0, 0.5 * std::numbers::pi, -0.5 * std::numbers::pi, std::numbers::pi})
        if (std::abs(a) <= half)
            include(radius_m * std::cos(a), radius_m * std::sin(a));
    return box;
}

Direction SectorGeometry::direction_to(Vec2 mast, double boresight_rad, Vec2 user) const
{
    const double dx = user.x - mast.x;
    const double dy = user.y - mast.y;
    const double c = std::cos(boresight_rad), s = std::sin(boresight_rad);
    const double lx = dx * c + dy * s;
    const double ly = -dx * s + dy * c;
    const double lz = user_height_m - antenna_height_m;
    const double r = std::sqrt(lx * lx + ly * ly + lz * lz);
    return {std::acos(lz / r), std::atan2(ly, lx)};
}

double SectorGeometry::distance_3d(Vec2 mast, Vec2 user) const
{
    const double dz = antenna_height_m - user_height_m;
    return std::sqrt((user.x - mast.x) * (user.x - mast.x) + (user.y - mast.y) * (user.y - mast.y) + dz * dz);
}

} // namespace beamsim
