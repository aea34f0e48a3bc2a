// SPDX-License-Identifier: Apache-2.0
//
// Text formats: JSON records for designs, codebooks and KPI reports, CSV for
// rasters, pattern cuts, session traces and histograms. Angles are radians.

#pragma once

#include "beamsim/codebook.hpp"
#include "beamsim/netsim.hpp"
#include "beamsim/optimizer.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace beamsim
{

using Json = nlohmann::ordered_json;

Json design_to_json(const ArrayDesign &design);
ArrayDesign design_from_json(const Json &j);

Json optimized_to_json(const OptimizedDesign &design);
OptimizedDesign optimized_from_json(const Json &j);

Json codebook_to_json(const Codebook &codebook);
// Rebuilds gains and rasters from the stored beams.
Codebook codebook_from_json(const Json &j);

Json kpi_to_json(const KpiReport &report);
KpiReport kpi_from_json(const Json &j);

// "inf" for infinity, the number otherwise.
Json shape_to_json(double m_shape);
double shape_from_json(const Json &j);

Json read_json_file(const std::filesystem::path &path);
void write_json_file(const std::filesystem::path &path, const Json &j);

// Long format: x_m, y_m, beam_id for every pixel inside the sector.
void write_raster_csv(const std::filesystem::path &path, const CoverageRaster &raster);
void write_pattern_grid_csv(const std::filesystem::path &path, const std::vector<PatternSample> &samples);
void write_cut_csv(const std::filesystem::path &path, const std::vector<std::pair<double, double>> &cut);
void write_sessions_csv(const std::filesystem::path &path, const std::vector<SessionRecord> &sessions);
void write_histogram_csv(const std::filesystem::path &path, const Codebook &codebook, const KpiReport &report);

} // namespace beamsim
