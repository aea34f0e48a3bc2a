// SPDX-License-Identifier: Apache-2.0
//
// beamsim: optimize | codebook | simulate | report
// Exit codes: 0 success, 1 infeasible or unstable, 2 bad configuration or usage.

#include "beamsim/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace beamsim;

namespace
{

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Common
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> levels;
};

ScenarioConfig resolve(const Common &c)
{
    ScenarioConfig cfg = c.config.empty() ? preset("mass_event") : load_config(c.config);
    if (c.seed)
        cfg.seed = *c.seed;
    if (!c.out.empty())
        cfg.output_dir = c.out;
    if (c.levels)
    {
        if (*c.levels < 0 || *c.levels >= static_cast<int>(cfg.levels.size()))
            throw ConfigError("--levels must lie in [0, " + std::to_string(cfg.levels.size() - 1) + "]");
        cfg.sim.level_cap = *c.levels;
    }
    return cfg;
}

std::string shape_label(double m)
{
    if (std::isinf(m))
        return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", m);
    return buf;
}

std::string gain_pct(double value, double base)
{
    if (!(base > 0.0))
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%+.0f%%)", 100.0 * (value / base - 1.0));
    return buf;
}

std::string gain_pct_signed2(double value, double base)
{
    if (!(base > 0.0))
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%+.2f%%)", 100.0 * (value / base - 1.0));
    return buf;
}

void print_header()
{
    std::printf("%-16s %-22s %-22s %-20s %9s %6s\n", "run", "MUT (Mbps)", "CET (Mbps)", "PC (W)", "sessions", "busy");
}

void print_row(const std::string &label, const KpiReport &r, const KpiReport *base)
{
    char mut[64], cet[64], pc[64];
    std::snprintf(mut, sizeof mut, "%.2f%s", r.mut_bps / 1e6, base ? gain_pct(r.mut_bps, base->mut_bps).c_str() : "");
    std::snprintf(cet, sizeof cet, "%.2f%s", r.cet_bps / 1e6, base ? gain_pct(r.cet_bps, base->cet_bps).c_str() : "");
    std::snprintf(pc, sizeof pc, "%.0f%s", r.pc_w, base ? gain_pct_signed2(r.pc_w, base->pc_w).c_str() : "");
    std::printf("%-16s %-22s %-22s %-20s %9llu %6.3f\n", label.c_str(), mut, cet, pc,
                static_cast<unsigned long long>(r.sessions_completed), r.busy_fraction);
}

OptimizedDesign run_optimize(const ScenarioConfig &cfg)
{
    const auto sizes = cfg.optimized_sizes();
    return optimize(cfg.space, sizes, cfg.search);
}

void print_design(const OptimizedDesign &d)
{
    std::printf("design: %dx%d d_x=%.4f d_z=%.4f alpha_x=%.4f alpha_z=%.4f\n", d.design.n_x, d.design.n_z,
                d.design.d_x, d.design.d_z, d.design.alpha_x, d.design.alpha_z);
    std::printf("achieved gain: %.2f dBi\n", d.achieved_gain_db);
    if (std::isinf(d.worst_sidelobe_db))
        std::printf("worst side lobe: none\n");
    else
        std::printf("worst side lobe: %.2f dB below peak\n", d.worst_sidelobe_db);
}

int cmd_optimize(const Common &common)
{
    const ScenarioConfig cfg = resolve(common);
    const OptimizedDesign d = run_optimize(cfg);
    const fs::path path = fs::path(cfg.output_dir) / "design.json";
    write_json_file(path, optimized_to_json(d));
    print_design(d);
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

OptimizedDesign load_or_optimize(const ScenarioConfig &cfg, const std::string &design_file)
{
    fs::path path = design_file;
    if (path.empty())
    {
        path = fs::path(cfg.output_dir) / "design.json";
        if (!fs::exists(path))
        {
            std::fprintf(stderr, "no design file, optimizing first\n");
            const OptimizedDesign d = run_optimize(cfg);
            write_json_file(path, optimized_to_json(d));
            return d;
        }
    }
    return optimized_from_json(read_json_file(path));
}

int cmd_codebook(const Common &common, const std::string &design_file)
{
    const ScenarioConfig cfg = resolve(common);
    const OptimizedDesign design = load_or_optimize(cfg, design_file);
    const Codebook cb = build_codebook(design, cfg.geometry(), cfg.levels, cfg.space, cfg.codebook);
    const fs::path dir = cfg.output_dir;
    write_json_file(dir / "codebook.json", codebook_to_json(cb));

    std::printf("%-6s %-10s %-6s %-8s %-10s\n", "level", "sub-array", "beams", "split", "gap px");
    for (int l = 0; l <= cb.depth(); ++l)
    {
        write_raster_csv(dir / ("coverage_level" + std::to_string(l) + ".csv"), cb.raster(l));
        const auto &spec = cb.level_specs()[static_cast<std::size_t>(l)];
        char size[16];
        std::snprintf(size, sizeof size, "%dx%d", spec.size.n_x, spec.size.n_z);
        std::printf("%-6d %-10s %-6zu %-8s %-10zu\n", l, size, cb.level(l).size(), to_string(spec.split).c_str(),
                    cb.gap_pixels()[static_cast<std::size_t>(l)]);
        const int first = cb.level(l).front();
        write_pattern_grid_csv(dir / "patterns" / ("grid_level" + std::to_string(l) + ".csv"),
                               sample_pattern_grid(cb.gain(first), 181, 181));
    }
    for (const Beam &b : cb.beams())
    {
        const std::string stem = "beam" + std::to_string(b.id);
        write_cut_csv(dir / "patterns" / (stem + "_elevation.csv"), principal_cut_db(cb.gain(b.id), true, 721));
        write_cut_csv(dir / "patterns" / (stem + "_azimuth.csv"), principal_cut_db(cb.gain(b.id), false, 721));
    }
    const InclusionReport inc = cb.inclusion();
    std::printf("%zu beams, inclusion violations %zu of %zu pixels%s\n", cb.size(), inc.violating_pixels,
                inc.checked_pixels, cb.relaxed() ? " (relaxed)" : "");
    std::printf("wrote %s\n", (dir / "codebook.json").string().c_str());
    return 0;
}

Json histogram_rows(const Codebook &cb, const KpiReport &r)
{
    std::uint64_t total = 0;
    for (auto n : r.beam_histogram)
        total += n;
    Json rows = Json::array();
    for (std::size_t b = 0; b < r.beam_histogram.size(); ++b)
    {
        const Beam &beam = cb.beam(static_cast<int>(b));
        rows.push_back({{"beam_id", b},
                        {"level", beam.level},
                        {"index", beam.index},
                        {"served_slots", r.beam_histogram[b]},
                        {"probability", total ? static_cast<double>(r.beam_histogram[b]) / static_cast<double>(total)
                                              : 0.0}});
    }
    return rows;
}

int cmd_simulate(const Common &common, const std::string &codebook_file)
{
    const ScenarioConfig cfg = resolve(common);
    const fs::path dir = cfg.output_dir;
    const fs::path cb_path = codebook_file.empty() ? dir / "codebook.json" : fs::path(codebook_file);
    if (!fs::exists(cb_path))
        throw ConfigError("codebook file " + cb_path.string() + " not found (run the codebook command first)");
    const Codebook cb = codebook_from_json(read_json_file(cb_path));

    CellModel cell{&cb, cfg.layout(), cfg.radio};
    const TrafficModel traffic = cfg.traffic();
    const auto seeds = cfg.seeds();
    const int full = cfg.sim.level_cap < 0 ? cb.depth() : std::min(cfg.sim.level_cap, cb.depth());

    std::vector<int> caps;
    if (cfg.campaign == "on_off")
        caps = {0, full};
    else
        for (int l = 0; l <= full; ++l)
            caps.push_back(l);

    Json seed_list = Json::array();
    for (auto s : seeds)
        seed_list.push_back(s);

    print_header();
    for (double m : cfg.m_shapes)
    {
        std::optional<KpiReport> base;
        for (int cap : caps)
        {
            SimSettings settings = cfg.sim;
            settings.m_shape = m;
            settings.level_cap = cap;
            const KpiReport r = run_replications(cell, traffic, settings, seeds);
            const std::string tag = "m" + shape_label(m) + "_L" + std::to_string(cap);

            Json report = {{"format", "beamsim-report"},
                           {"version", 1},
                           {"config", config_to_json(cfg)},
                           {"seeds", seed_list},
                           {"m_shape", shape_to_json(m)},
                           {"level_cap", cap},
                           {"kpi", kpi_to_json(r)},
                           {"histogram", histogram_rows(cb, r)}};
            write_json_file(dir / ("report_" + tag + ".json"), report);
            write_sessions_csv(dir / ("sessions_" + tag + ".csv"), r.sessions);
            write_histogram_csv(dir / ("histogram_" + tag + ".csv"), cb, r);

            if (r.estimated_utilization >= 1.0)
                std::fprintf(stderr, "warning: %s estimated level-0 utilization %.2f >= 1, the queue may not settle\n",
                             tag.c_str(), r.estimated_utilization);
            print_row(tag, r, base ? &*base : nullptr);
            if (!base)
                base = r;
        }
    }
    std::printf("reports in %s\n", dir.string().c_str());
    return 0;
}

int cmd_report(const std::vector<std::string> &files, const std::string &out)
{
    if (files.empty())
    {
        std::fprintf(stderr, "report: at least one report file is required\n");
        return kExitUsage;
    }
    std::vector<KpiReport> reports;
    std::vector<Json> docs;
    for (const auto &f : files)
    {
        Json j = read_json_file(f);
        if (j.value("format", "") != "beamsim-report")
            throw ConfigError(f + ": not a report file");
        reports.push_back(kpi_from_json(j.at("kpi")));
        docs.push_back(std::move(j));
    }
    const fs::path dir = out.empty() ? fs::path(files.front()).parent_path() : fs::path(out);
    print_header();
    for (std::size_t i = 0; i < reports.size(); ++i)
    {
        const std::string stem = fs::path(files[i]).stem().string();
        print_row(stem, reports[i], i > 0 ? &reports.front() : nullptr);

        const fs::path csv = dir / ("histogram_" + stem + ".csv");
        if (csv.has_parent_path())
            fs::create_directories(csv.parent_path());
        std::ofstream h(csv);
        if (!h)
            throw std::runtime_error("cannot write " + csv.string());
        h.precision(17);
        h << "beam_id,level,index,served_slots,probability\n";
        for (const auto &row : docs[i].at("histogram"))
            h << row.at("beam_id").get<int>() << ',' << row.at("level").get<int>() << ','
              << row.at("index").get<int>() << ',' << row.at("served_slots").get<std::uint64_t>() << ','
              << row.at("probability").get<double>() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multilevel beamforming codebook design and system-level simulation"};
    app.require_subcommand(1);

    Common common;
    std::string design_file, codebook_file, report_out;
    std::vector<std::string> report_files;

    auto add_common = [&](CLI::App *sub, bool with_levels) {
        sub->add_option("--config", common.config, "Scenario JSON (defaults to the mass_event preset)");
        sub->add_option("--seed", common.seed, "Overrides the configured seed");
        sub->add_option("--out", common.out, "Output directory (overrides output_dir)");
        if (with_levels)
            sub->add_option("--levels", common.levels, "Deepest codebook level the beam search may reach");
    };

    auto *opt = app.add_subcommand("optimize", "Optimize the array design");
    add_common(opt, false);
    auto *cbk = app.add_subcommand("codebook", "Build the codebook and export coverage and patterns");
    add_common(cbk, false);
    cbk->add_option("--design", design_file, "Design record from the optimize command");
    auto *sim = app.add_subcommand("simulate", "Run the simulation campaign");
    add_common(sim, true);
    sim->add_option("--codebook", codebook_file, "Codebook file from the codebook command");
    auto *rep = app.add_subcommand("report", "Compare report files");
    rep->add_option("files", report_files, "Report JSON files; gains are relative to the first");
    rep->add_option("--out", report_out, "Directory for histogram exports");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try
    {
        if (*opt)
            return cmd_optimize(common);
        if (*cbk)
            return cmd_codebook(common, design_file);
        if (*sim)
            return cmd_simulate(common, codebook_file);
        return cmd_report(report_files, report_out);
    }
    catch (const ConfigError &e)
    {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitUsage;
    }
    catch (const InfeasibleError &e)
    {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitFailure;
    }
    catch (const UnstableError &e)
    {
        std::fprintf(stderr, "unstable: %s\n", e.what());
        return kExitFailure;
    }
    catch (const std::invalid_argument &e)
    {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitUsage;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}
