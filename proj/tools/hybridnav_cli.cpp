#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hybridnav.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;

int exit_code_for(hn_status st)
{
    // Bad user input (flags, files, overrides) is 2; anything else is 1.
    return (st == HN_ERROR_CONFIG || st == HN_ERROR_IO) ? kExitConfig : kExitInternal;
}

bool parse_seed_list(const std::string& text, std::vector<uint64_t>& out)
{
    // Accepts "7", "0..9" (inclusive), or "1,4,9".
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(pos, end - pos);
        const size_t dots = item.find("..");
        try {
            if (dots != std::string::npos) {
                size_t used = 0;
                const uint64_t lo = std::stoull(item.substr(0, dots), &used);
                if (used != dots) return false;
                const std::string hi_text = item.substr(dots + 2);
                const uint64_t hi = std::stoull(hi_text, &used);
                if (used != hi_text.size() || hi < lo) return false;
                for (uint64_t s = lo; s <= hi; ++s) out.push_back(s);
            } else {
                size_t used = 0;
                const uint64_t s = std::stoull(item, &used);
                if (used != item.size()) return false;
                out.push_back(s);
            }
        } catch (const std::exception&) {
            return false;
        }
        pos = end + 1;
    }
    return !out.empty();
}

std::string resolve_scenario(const std::string& arg)
{
    if (fs::exists(arg)) return arg;
    // Short IDs (C1..C4) resolve against $HYBRIDNAV_SCENARIOS, then ./scenarios.
    if (arg.find('/') == std::string::npos && arg.find('.') == std::string::npos) {
        if (const char* dir = std::getenv("HYBRIDNAV_SCENARIOS")) {
            const fs::path p = fs::path(dir) / (arg + ".scn");
            if (fs::exists(p)) return p.string();
        }
        const fs::path p = fs::path("scenarios") / (arg + ".scn");
        if (fs::exists(p)) return p.string();
    }
    return arg;  // let the loader produce the error message
}

void print_episode_line(const hn_episode* ep)
{
    hn_metrics m{};
    hn_episode_metrics(ep, &m);
    const char* outcome = m.outcome == 0 ? "reached" : m.outcome == 1 ? "collided" : "timeout";
    std::printf("%s %s seed=%llu %s time=%.2fs path=%.2fm speed=%.2fm/s dwa=%d reactive=%d",
                hn_episode_scenario(ep), hn_episode_planner(ep),
                static_cast<unsigned long long>(hn_episode_seed(ep)), outcome, m.nav_time,
                m.path_length, m.mean_speed, m.dwa_ticks, m.reactive_ticks);
    if (m.has_reaction_time) std::printf(" reaction=%.2fs", m.reaction_time);
    std::printf("\n");
}

int cmd_run(const std::string& scenario_arg, const std::string& planner_arg,
            const std::string& seeds_arg, const std::string& out_dir,
            const std::vector<std::string>& overrides)
{
    std::vector<uint64_t> seeds;
    if (!parse_seed_list(seeds_arg, seeds)) {
        std::fprintf(stderr, "error: bad --seeds '%s', want N, A..B, or A,B,C\n",
                     seeds_arg.c_str());
        return kExitConfig;
    }

    std::vector<std::string> planners;
    if (planner_arg == "all") {
        planners = {"dwa", "reactive", "hybrid"};
    } else if (planner_arg == "dwa" || planner_arg == "reactive" || planner_arg == "hybrid") {
        planners = {planner_arg};
    } else {
        std::fprintf(stderr, "error: bad --planner '%s', want dwa|reactive|hybrid|all\n",
                     planner_arg.c_str());
        return kExitConfig;
    }

    hn_scenario* sc = nullptr;
    hn_status st = hn_scenario_load(resolve_scenario(scenario_arg).c_str(), &sc);
    if (st != HN_OK) {
        std::fprintf(stderr, "error: %s\n", hn_last_error());
        return exit_code_for(st);
    }
    for (const std::string& ov : overrides) {
        const size_t eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "error: bad --set '%s', want key=value\n", ov.c_str());
            hn_scenario_free(sc);
            return kExitConfig;
        }
        st = hn_scenario_override(sc, ov.substr(0, eq).c_str(), ov.substr(eq + 1).c_str());
        if (st != HN_OK) {
            std::fprintf(stderr, "error: %s\n", hn_last_error());
            hn_scenario_free(sc);
            return exit_code_for(st);
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "error: cannot create output dir '%s': %s\n", out_dir.c_str(),
                     ec.message().c_str());
        hn_scenario_free(sc);
        return kExitConfig;
    }

    hn_summary* summary = nullptr;
    hn_summary_new(&summary);
    int rc = kExitOk;

    for (const std::string& planner : planners) {
        for (const uint64_t seed : seeds) {
            hn_episode* ep = nullptr;
            st = hn_episode_run(sc, planner.c_str(), seed, &ep);
            if (st != HN_OK) {
                std::fprintf(stderr, "error: %s\n", hn_last_error());
                rc = exit_code_for(st);
                goto done;
            }
            print_episode_line(ep);
            hn_summary_add(summary, ep);

            char stem[256];
            std::snprintf(stem, sizeof(stem), "%s_%s_seed%llu", hn_episode_scenario(ep),
                          planner.c_str(), static_cast<unsigned long long>(seed));
            const fs::path log_path = fs::path(out_dir) / (std::string(stem) + ".jsonl");
            const fs::path svg_path = fs::path(out_dir) / (std::string(stem) + ".svg");
            st = hn_episode_save_log(ep, log_path.string().c_str());
            if (st == HN_OK) st = hn_episode_save_svg(ep, svg_path.string().c_str());
            hn_episode_free(ep);
            if (st != HN_OK) {
                std::fprintf(stderr, "error: %s\n", hn_last_error());
                rc = exit_code_for(st);
                goto done;
            }
        }
    }

    {
        char* table = nullptr;
        if (hn_summary_format(summary, &table) == HN_OK) {
            std::printf("\n%s", table);
            hn_string_free(table);
        }
        const fs::path csv_path = fs::path(out_dir) / "summary.csv";
        st = hn_summary_write_csv(summary, csv_path.string().c_str());
        if (st != HN_OK) {
            std::fprintf(stderr, "error: %s\n", hn_last_error());
            rc = exit_code_for(st);
        }
    }

done:
    hn_summary_free(summary);
    hn_scenario_free(sc);
    return rc;
}

int cmd_replay(const std::string& log_path, const std::string& out_dir)
{
    hn_episode* ep = nullptr;
    const hn_status st = hn_episode_load_log(log_path.c_str(), &ep);
    if (st != HN_OK) {
        std::fprintf(stderr, "error: %s\n", hn_last_error());
        return exit_code_for(st);
    }
    print_episode_line(ep);

    fs::path svg_path = fs::path(log_path).replace_extension(".svg");
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            std::fprintf(stderr, "error: cannot create output dir '%s': %s\n", out_dir.c_str(),
                         ec.message().c_str());
            hn_episode_free(ep);
            return kExitConfig;
        }
        svg_path = fs::path(out_dir) / svg_path.filename();
    }
    const hn_status save = hn_episode_save_svg(ep, svg_path.string().c_str());
    hn_episode_free(ep);
    if (save != HN_OK) {
        std::fprintf(stderr, "error: %s\n", hn_last_error());
        return exit_code_for(save);
    }
    std::printf("svg: %s\n", svg_path.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hybridnav: switching local planner simulation harness"};
    app.require_subcommand(1);

    std::string scenario;
    std::string planner = "hybrid";
    std::string seeds = "0";
    std::string out_dir = "out";
    std::vector<std::string> overrides;

    CLI::App* run = app.add_subcommand("run", "Run episodes and write logs, SVGs, and a summary");
    run->add_option("--scenario", scenario, "Scenario file or ID (C1..C4)")->required();
    run->add_option("--planner", planner, "dwa|reactive|hybrid|all");
    run->add_option("--seeds", seeds, "Seed list: N, A..B, or A,B,C");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--set", overrides, "Config override key=value (repeatable)");

    std::string log_path;
    std::string replay_out;
    CLI::App* replay = app.add_subcommand("replay", "Recreate SVG and metrics from a stored log");
    replay->add_option("log", log_path, "Episode log (.jsonl)")->required();
    replay->add_option("--out", replay_out, "Output directory (default: beside the log)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(scenario, planner, seeds, out_dir, overrides);
    return cmd_replay(log_path, replay_out);
}
