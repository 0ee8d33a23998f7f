#ifndef TMKIT_TMKIT_H
#define TMKIT_TMKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TMKIT_API __declspec(dllexport)
#else
#define TMKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tm_status {
    TM_OK = 0,
    TM_E_INVALID_ARGUMENT = 1,
    TM_E_IO = 2,
    TM_E_PARSE = 3,
    TM_E_UNKNOWN_ELEMENT = 4,
    TM_E_DISCONNECTED_REGION = 5,
    TM_E_DUPLICATE_EVENT = 6,
    TM_E_UNKNOWN_EVENT = 7,
    TM_E_CONTAINMENT = 8,
    TM_E_EMPTY_GRAPH = 9,
    TM_E_RUN_CAP = 10,
    TM_E_DIVERGENCE = 11,
    TM_E_DIVISION_BY_ZERO = 12,
    TM_E_INVALID_RULE = 13,
    TM_E_DOMAIN = 14,
    TM_E_EMPTY_OBSERVATION = 15,
    TM_E_INTERNAL = 16
} tm_status;

typedef enum tm_render_target {
    TM_RENDER_STATIC = 0,
    TM_RENDER_EVENTS = 1,
    TM_RENDER_BEHAVIOR = 2
} tm_render_target;

typedef struct tm_document tm_document;
typedef struct tm_config tm_config;
typedef struct tm_batch tm_batch;

typedef struct tm_census {
    size_t thimacs;
    size_t stages;
    size_t flows;
    size_t triggers;
    size_t variables;
    size_t rules;
    size_t events;
} tm_census;

/* Message of the last failed call on this thread; never NULL. */
TMKIT_API const char* tm_last_error(void);
TMKIT_API const char* tm_status_name(tm_status status);
TMKIT_API const char* tm_version(void);

/* Every char** output is allocated by the library and released with tm_string_free. */
TMKIT_API void tm_string_free(char* text);

/* Parsing. On TM_E_PARSE *out still receives a document holding the diagnostics.
   With strict == 0 unresolved references are warnings and validation reports them.
   Any other operation on a document that failed to parse returns TM_E_PARSE. */
TMKIT_API tm_status tm_document_parse(const char* text, const char* origin, int strict, tm_document** out);
TMKIT_API tm_status tm_document_load(const char* path, int strict, tm_document** out);
TMKIT_API void tm_document_free(tm_document* doc);
TMKIT_API int tm_document_ok(const tm_document* doc);
TMKIT_API tm_status tm_document_diagnostics(const tm_document* doc, char** text);
TMKIT_API tm_status tm_document_serialize(const tm_document* doc, char** text);
TMKIT_API tm_status tm_document_census(const tm_document* doc, tm_census* out);
/* Parses `rules` as rule declarations; each replaces the rule on the same stage or is appended. */
TMKIT_API tm_status tm_document_replace_rules(tm_document* doc, const char* rules);

/* Static validation plus event and behavior construction. */
TMKIT_API tm_status tm_validate(const tm_document* doc, size_t* violations, char** report);
TMKIT_API tm_status tm_decompose(const tm_document* doc, size_t* uncovered, char** report);
TMKIT_API tm_status tm_behavior_runs(const tm_document* doc, size_t max_recurrence, size_t max_runs,
                                     size_t* count, char** text);
/* `events` is a whitespace or comma separated event id sequence. */
TMKIT_API tm_status tm_behavior_conforms(const tm_document* doc, const char* events, int* conformant,
                                         char** verdict);
TMKIT_API tm_status tm_render(const tm_document* doc, tm_render_target target, int show_triggers,
                              int cluster_thimacs, char** dot);

/* Engine configuration. */
TMKIT_API tm_config* tm_config_new(void);
TMKIT_API void tm_config_free(tm_config* config);
TMKIT_API tm_status tm_config_set_seed(tm_config* config, uint64_t seed);
TMKIT_API tm_status tm_config_set_max_ticks(tm_config* config, uint64_t max_ticks);
TMKIT_API tm_status tm_config_set_id_sorted(tm_config* config, int id_sorted);
TMKIT_API tm_status tm_config_set_max_in_flight(tm_config* config, size_t max_in_flight);
TMKIT_API tm_status tm_config_set_value(tm_config* config, const char* variable, double value);

/* Runs `runs` simulations with seeds seed, seed + 1, ... */
TMKIT_API tm_status tm_simulate(const tm_document* doc, const tm_config* config, size_t runs,
                                unsigned threads, tm_batch** out);
TMKIT_API void tm_batch_free(tm_batch* batch);
TMKIT_API size_t tm_batch_size(const tm_batch* batch);
TMKIT_API tm_status tm_batch_trace_tsv(const tm_batch* batch, char** text);
TMKIT_API tm_status tm_batch_trace_jsonl(const tm_batch* batch, char** text);
/* One line per run: seed, tab, space separated event sequence. */
TMKIT_API tm_status tm_batch_events(const tm_batch* batch, char** text);
TMKIT_API tm_status tm_batch_verdicts(const tm_batch* batch, size_t* nonconformant, char** text);
TMKIT_API tm_status tm_batch_ticks_tsv(const tm_batch* batch, size_t run, char** text);
TMKIT_API tm_status tm_batch_warnings(const tm_batch* batch, size_t* count, char** text);
/* Empirical information over all runs. `outcomes` is comma separated; NULL or "" selects the
   first exclusive group of the behavior. */
TMKIT_API tm_status tm_batch_info(const tm_batch* batch, const char* outcomes, double base, char** text,
                                  char** json);
TMKIT_API tm_status tm_batch_summary(const tm_batch* batch, const char* outcomes, char** text);

/* Information measures. */
TMKIT_API tm_status tm_self_information(double p, double base, double* out);
TMKIT_API tm_status tm_entropy(const double* probabilities, size_t n, double base, double* out);
TMKIT_API tm_status tm_info_report(const char* const* labels, const double* probabilities, size_t n,
                                   double base, char** text, char** json);

/* Bundled models, in a fixed order. */
TMKIT_API size_t tm_bundled_count(void);
TMKIT_API tm_status tm_bundled_model(size_t index, const char** name, const char** file,
                                     const char** provenance);

#ifdef __cplusplus
}
#endif

#endif
