// SPDX-License-Identifier: Apache-2.0
//
// Multilevel beam tree. Level 0 holds one wide beam covering the sector; every
// beam at level l < L has two children at level l + 1 obtained by halving its
// angular target region along the level's split axis. Coverage rasters assign
// each sector pixel to exactly one beam per level (best server).

#pragma once

#include "beamsim/antenna.hpp"
#include "beamsim/geometry.hpp"
#include "beamsim/optimizer.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsim
{

class CoverageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class SplitAxis
{
    none,
    azimuth,
    elevation,
};

std::string to_string(SplitAxis axis);
SplitAxis split_axis_from_string(const std::string &name);

struct LevelSpec
{
    SubarraySize size;
    SplitAxis split = SplitAxis::none;  // how this level divides its parents

    bool operator==(const LevelSpec &) const = default;
};

// Angular target of a beam: azimuth interval and depression-angle interval
// (radians below the horizon).
struct AngularRegion
{
    double azimuth_lo = 0.0;
    double azimuth_hi = 0.0;
    double depression_lo = 0.0;  // far edge
    double depression_hi = 0.0;  // near edge

    bool operator==(const AngularRegion &) const = default;
};

struct Beam
{
    int id = 0;
    int level = 0;
    int index = 1;  // 1-based within the level
    SubarraySize subarray;
    SteeringAngles steer;
    double peak_gain_db = 0.0;
    std::optional<int> parent;
    std::vector<int> children;
    AngularRegion target;
};

struct CoverageRaster
{
    double origin_x = 0.0;  // lower-left corner
    double origin_y = 0.0;
    double cell_m = 5.0;
    int nx = 0;
    int ny = 0;
    // Beam id per pixel; -1 outside the sector or where no beam radiates.
    std::vector<int> owner;
    // Pixel is inside the sector polygon.
    std::vector<char> inside;

    Vec2 center(int ix, int iy) const
    {
        return {origin_x + (ix + 0.5) * cell_m, origin_y + (iy + 0.5) * cell_m};
    }
    std::optional<std::pair<int, int>> pixel_of(Vec2 p) const;
    int owner_at(Vec2 p) const;
    std::size_t inside_count() const;
};

struct CodebookOptions
{
    bool relaxed = false;         // per-level best server without the parent restriction
    double pixel_m = 5.0;
    double max_gap_fraction = 0.02;
    int quadrature_resolution = 512;
};

struct InclusionReport
{
    // Child pixels falling outside the parent's coverage, summed over the tree.
    std::size_t violating_pixels = 0;
    std::size_t checked_pixels = 0;
    bool holds() const { return violating_pixels == 0; }
};

class Codebook
{
public:
    const std::vector<Beam> &beams() const { return beams_; }
    const Beam &beam(int id) const { return beams_.at(static_cast<std::size_t>(id)); }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }  // L
    const std::vector<int> &level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }
    const std::vector<LevelSpec> &level_specs() const { return specs_; }
    const OptimizedDesign &design() const { return design_; }
    const SectorGeometry &geometry() const { return geometry_; }
    bool relaxed() const { return options_.relaxed; }
    const CodebookOptions &options() const { return options_; }
    const CoverageRaster &raster(int l) const { return rasters_.at(static_cast<std::size_t>(l)); }
    const BeamGain &gain(int id) const { return gains_.at(static_cast<std::size_t>(id)); }
    int root() const { return 0; }
    std::size_t size() const { return beams_.size(); }
    // Pixels per level that no beam of the level radiates into.
    const std::vector<std::size_t> &gap_pixels() const { return gap_pixels_; }

    // Pixels where `id` is best server among its level.
    std::vector<std::pair<int, int>> coverage(int id) const;
    InclusionReport inclusion() const;

    friend Codebook build_codebook(const OptimizedDesign &, const SectorGeometry &, const std::vector<LevelSpec> &,
                                   const DesignSpace &, const CodebookOptions &);
    friend Codebook assemble_codebook(const OptimizedDesign &, const SectorGeometry &, const std::vector<LevelSpec> &,
                                      std::vector<Beam>, const CodebookOptions &);

private:
    void compute_gains();
    void compute_rasters();

    OptimizedDesign design_;
    SectorGeometry geometry_;
    std::vector<LevelSpec> specs_;
    CodebookOptions options_;
    std::vector<Beam> beams_;
    std::vector<std::vector<int>> levels_;
    std::vector<BeamGain> gains_;
    std::vector<CoverageRaster> rasters_;
    std::vector<std::size_t> gap_pixels_;
};

// Level-0 steering: sector-center azimuth, tilt chosen so the upper -3 dB
// point of the elevation cut sits on the cell edge.
SteeringAngles wide_beam_steering(const ArrayDesign &design, const SectorGeometry &geometry);

// Builds the tree, rasters and structural checks. Steering angles are rounded
// to 9 significant digits so the text serialization is exact.
Codebook build_codebook(const OptimizedDesign &design, const SectorGeometry &geometry,
                        const std::vector<LevelSpec> &levels, const DesignSpace &space,
                        const CodebookOptions &options = {});

// Rebuilds a codebook from stored beams (deserialization path).
Codebook assemble_codebook(const OptimizedDesign &design, const SectorGeometry &geometry,
                           const std::vector<LevelSpec> &levels, std::vector<Beam> beams,
                           const CodebookOptions &options);

struct SelectionStep
{
    int new_best = 0;
    double new_best_sinr = 0.0;
    std::optional<int> next_cursor;
    int probes = 0;
};

using SinrProbe = std::function<double(int beam_id)>;

// One iteration of the greedy descent: the running best (whose SINR the caller
// already knows) competes with the two children of the cursor, which are the
// only beams probed. Ties keep the running best. level_cap < 0 means no cap.
SelectionStep select_beam_step(const Codebook &codebook, int current_best, double current_best_sinr, int cursor,
                               const SinrProbe &sinr_of, int level_cap = -1);

struct BeamSearchResult
{
    int best = 0;
    int probes = 0;
    std::vector<int> best_trace;         // running best after each probe round
    std::vector<double> best_sinr_trace;  // its SINR
};

// Full search from the level-0 beam until the cursor runs out.
BeamSearchResult beam_search(const Codebook &codebook, const SinrProbe &sinr_of, int level_cap = -1);

double round_significant(double value, int digits);

} // namespace beamsim
