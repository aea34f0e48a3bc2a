// SPDX-License-Identifier: Apache-2.0
//
// Shared test fixtures: the optimized designs of the two presets (as written by
// `beamsim optimize`), so module tests do not rerun the optimizer.

#pragma once

#include "beamsim/scenario.hpp"

#include <map>
#include <memory>

namespace fixtures
{

inline beamsim::OptimizedDesign mass_event_design()
{
    return {{12, 32, 0.4375, 0.7, 0.18701222535385967, 0.1743938831664894}, 30.052023849433887, 30.19780893276867, true};
}

inline beamsim::OptimizedDesign rural_design()
{
    return {{20, 14, 0.3671875, 0.7, 0.16262694285542048, 0.200543572955563}, 27.885338161892413, 30.00288664233134,
            true};
}

// Built once per process and per (preset, relaxed) pair.
inline const beamsim::Codebook &codebook(const std::string &name, bool relaxed)
{
    static std::map<std::pair<std::string, bool>, std::unique_ptr<beamsim::Codebook>> cache;
    auto &slot = cache[{name, relaxed}];
    if (!slot)
    {
        beamsim::ScenarioConfig cfg = beamsim::preset(name);
        cfg.codebook.relaxed = relaxed;
        const auto design = name == "rural" ? rural_design() : mass_event_design();
        slot = std::make_unique<beamsim::Codebook>(
            beamsim::build_codebook(design, cfg.geometry(), cfg.levels, cfg.space, cfg.codebook));
    }
    return *slot;
}

} // namespace fixtures
