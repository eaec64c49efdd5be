#include "hybridnav.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "hnav/episode.hpp"
#include "hnav/logio.hpp"
#include "hnav/scenario.hpp"
#include "hnav/svg.hpp"

namespace {

thread_local std::string g_last_error = "ok";

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
hn_status guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const hnav::ConfigError& e) {
        set_error(e.what());
        return HN_ERROR_CONFIG;
    } catch (const hnav::MapFormatError& e) {
        set_error(e.what());
        return HN_ERROR_CONFIG;
    } catch (const hnav::LogSchemaError& e) {
        set_error(e.what());
        return HN_ERROR_IO;
    } catch (const hnav::TruncatedLog& e) {
        set_error(e.what());
        return HN_ERROR_IO;
    } catch (const hnav::LogIntegrityError& e) {
        set_error(e.what());
        return HN_ERROR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return HN_ERROR;
    } catch (...) {
        set_error("unknown failure");
        return HN_ERROR;
    }
}

int outcome_code(const std::string& label)
{
    if (label == "reached") return 0;
    if (label == "collided") return 1;
    return 2;
}

}  // namespace

struct hn_scenario {
    hnav::Scenario sc;
};

struct hn_episode {
    std::vector<std::string> lines;
    hnav::ReplayData replay;
    hn_metrics metrics;
};

struct hn_summary {
    std::vector<hnav::EpisodeResult> rows;
};

extern "C" {

const char* hn_version(void) { return "hybridnav 1.0.0"; }

const char* hn_last_error(void) { return g_last_error.c_str(); }

hn_status hn_scenario_load(const char* path, hn_scenario** out)
{
    if (!path || !out) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        auto* h = new hn_scenario{hnav::load_scenario(path)};
        *out = h;
        return HN_OK;
    });
}

hn_status hn_scenario_override(hn_scenario* sc, const char* key, const char* value)
{
    if (!sc || !key || !value) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        hnav::apply_override(sc->sc.config, key, value);
        return HN_OK;
    });
}

void hn_scenario_free(hn_scenario* sc) { delete sc; }

static hn_metrics metrics_from_replay(const hnav::ReplayData& d)
{
    hn_metrics m{};
    m.outcome = outcome_code(d.outcome);
    m.nav_time = d.nav_time;
    m.path_length = d.path_length;
    m.mean_speed = d.mean_speed;
    m.has_reaction_time = d.reaction_time.has_value() ? 1 : 0;
    m.reaction_time = d.reaction_time.value_or(0.0);
    m.ticks = static_cast<int32_t>(d.ticks.size());
    m.dwa_ticks = d.dwa_ticks;
    m.reactive_ticks = d.reactive_ticks;
    m.feasibility_violations = d.feasibility_violations;
    return m;
}

hn_status hn_episode_run(const hn_scenario* sc, const char* planner, uint64_t seed,
                         hn_episode** out)
{
    if (!sc || !planner || !out) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        const auto mode = hnav::planner_from_name(planner);
        if (!mode) {
            set_error(std::string("unknown planner '") + planner +
                      "', want dwa|reactive|hybrid");
            return HN_ERROR_CONFIG;
        }
        const hnav::EpisodeResult res = hnav::run_episode(sc->sc, *mode, seed);
        auto* ep = new hn_episode;
        ep->lines = hnav::serialize_episode(sc->sc, res);
        ep->replay = hnav::parse_log_lines(ep->lines);
        ep->metrics = metrics_from_replay(ep->replay);
        *out = ep;
        return HN_OK;
    });
}

hn_status hn_episode_load_log(const char* path, hn_episode** out)
{
    if (!path || !out) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        std::ifstream f(path, std::ios::binary);
        if (!f) {
            set_error(std::string("cannot open log: ") + path);
            return HN_ERROR_IO;
        }
        auto* ep = new hn_episode;
        std::string line;
        while (std::getline(f, line)) ep->lines.push_back(line);
        try {
            ep->replay = hnav::parse_log_lines(ep->lines);
            hnav::verify_replay(ep->replay);
        } catch (...) {
            delete ep;
            throw;
        }
        ep->metrics = metrics_from_replay(ep->replay);
        *out = ep;
        return HN_OK;
    });
}

hn_status hn_episode_metrics(const hn_episode* ep, hn_metrics* out)
{
    if (!ep || !out) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    *out = ep->metrics;
    return HN_OK;
}

hn_status hn_episode_save_log(const hn_episode* ep, const char* path)
{
    if (!ep || !path) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        hnav::write_episode_log(path, ep->lines);
        return HN_OK;
    });
}

hn_status hn_episode_save_svg(const hn_episode* ep, const char* path)
{
    if (!ep || !path) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        hnav::write_svg(path, hnav::render_svg(ep->replay));
        return HN_OK;
    });
}

const char* hn_episode_scenario(const hn_episode* ep)
{
    return ep ? ep->replay.scenario_id.c_str() : "";
}

const char* hn_episode_planner(const hn_episode* ep)
{
    return ep ? ep->replay.planner.c_str() : "";
}

uint64_t hn_episode_seed(const hn_episode* ep) { return ep ? ep->replay.seed : 0; }

void hn_episode_free(hn_episode* ep) { delete ep; }

hn_status hn_summary_new(hn_summary** out)
{
    if (!out) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    *out = new hn_summary;
    return HN_OK;
}

hn_status hn_summary_add(hn_summary* sm, const hn_episode* ep)
{
    if (!sm || !ep) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    hnav::EpisodeResult r;
    r.scenario_id = ep->replay.scenario_id;
    r.planner = ep->replay.planner;
    r.seed = ep->replay.seed;
    r.outcome = ep->metrics.outcome == 0   ? hnav::Outcome::Reached
                : ep->metrics.outcome == 1 ? hnav::Outcome::Collided
                                           : hnav::Outcome::Timeout;
    r.nav_time = ep->metrics.nav_time;
    r.path_length = ep->metrics.path_length;
    r.mean_speed = ep->metrics.mean_speed;
    if (ep->metrics.has_reaction_time) r.reaction_time = ep->metrics.reaction_time;
    sm->rows.push_back(std::move(r));
    return HN_OK;
}

hn_status hn_summary_write_csv(const hn_summary* sm, const char* path)
{
    if (!sm || !path) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            set_error(std::string("cannot open csv: ") + path);
            return HN_ERROR_IO;
        }
        f << hnav::summary_csv(hnav::aggregate(sm->rows));
        return HN_OK;
    });
}

hn_status hn_summary_format(const hn_summary* sm, char** out)
{
    if (!sm || !out) {
        set_error("null argument");
        return HN_ERROR_CONFIG;
    }
    return guarded([&] {
        const std::string table = hnav::summary_table(hnav::aggregate(sm->rows));
        char* buf = new char[table.size() + 1];
        std::memcpy(buf, table.c_str(), table.size() + 1);
        *out = buf;
        return HN_OK;
    });
}

void hn_summary_free(hn_summary* sm) { delete sm; }

void hn_string_free(char* s) { delete[] s; }

}  // extern "C"
