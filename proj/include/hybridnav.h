/* hybridnav: scenario-driven 2D navigation runs behind a C ABI.
 *
 * Handles are opaque; every function that can fail returns hn_status and
 * leaves a message retrievable with hn_last_error() (thread-local). Pointers
 * returned through out-parameters are owned by the caller and released with
 * the matching _free function.
 */
#ifndef HYBRIDNAV_H
#define HYBRIDNAV_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hn_status {
    HN_OK = 0,
    HN_ERROR = 1,        /* internal failure */
    HN_ERROR_CONFIG = 2, /* bad scenario, unknown key, bad value */
    HN_ERROR_IO = 3      /* unreadable/unwritable file, malformed log */
} hn_status;

typedef struct hn_scenario hn_scenario;
typedef struct hn_episode hn_episode;
typedef struct hn_summary hn_summary;

typedef struct hn_metrics {
    int32_t outcome; /* 0 reached, 1 collided, 2 timeout */
    double nav_time;
    double path_length;
    double mean_speed;
    int32_t has_reaction_time;
    double reaction_time; /* valid iff has_reaction_time */
    int32_t ticks;
    int32_t dwa_ticks;
    int32_t reactive_ticks;
    int32_t feasibility_violations;
} hn_metrics;

const char* hn_version(void);

/* Message from the most recent failing call on this thread; never NULL. */
const char* hn_last_error(void);

hn_status hn_scenario_load(const char* path, hn_scenario** out);

/* Apply one dotted-key override, e.g. ("dwa.v_max", "0.8"). */
hn_status hn_scenario_override(hn_scenario* sc, const char* key, const char* value);

void hn_scenario_free(hn_scenario* sc);

/* planner: "dwa" | "reactive" | "hybrid". */
hn_status hn_episode_run(const hn_scenario* sc, const char* planner, uint64_t seed,
                         hn_episode** out);

/* Rebuild an episode from a stored JSON-lines log (verifies integrity). */
hn_status hn_episode_load_log(const char* path, hn_episode** out);

hn_status hn_episode_metrics(const hn_episode* ep, hn_metrics* out);
hn_status hn_episode_save_log(const hn_episode* ep, const char* path);
hn_status hn_episode_save_svg(const hn_episode* ep, const char* path);

/* Identification triple for naming output files. */
const char* hn_episode_scenario(const hn_episode* ep);
const char* hn_episode_planner(const hn_episode* ep);
uint64_t hn_episode_seed(const hn_episode* ep);

void hn_episode_free(hn_episode* ep);

hn_status hn_summary_new(hn_summary** out);
hn_status hn_summary_add(hn_summary* sm, const hn_episode* ep);
hn_status hn_summary_write_csv(const hn_summary* sm, const char* path);

/* Aligned text table; caller frees with hn_string_free. */
hn_status hn_summary_format(const hn_summary* sm, char** out);

void hn_summary_free(hn_summary* sm);
void hn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDNAV_H */
