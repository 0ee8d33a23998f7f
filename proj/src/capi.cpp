#include "tmkit/tmkit.h"

#include "tmkit/error.hpp"
#include "tmkit/info.hpp"
#include "tmkit/trace_io.hpp"
#include "tmkit/validate.hpp"
#include "tmkit/workspace.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

using namespace tmkit;

struct tm_document {
    std::string origin;
    ParseResult parsed;
    mutable std::optional<Workspace> workspace;

    const Workspace& assembled() const {
        if (!parsed.document) throw Error(ErrorCode::Parse, "document did not parse");
        if (!workspace) workspace = assemble(*parsed.document);
        return *workspace;
    }
};

struct tm_config {
    EngineConfig config;
};

struct tm_batch {
    Workspace workspace;
    EngineConfig config;
    std::vector<Trace> traces;
    std::vector<TraceEvents> events;
};

namespace {

thread_local std::string last_error;

tm_status status_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return TM_E_INVALID_ARGUMENT;
    case ErrorCode::Io: return TM_E_IO;
    case ErrorCode::Parse: return TM_E_PARSE;
    case ErrorCode::UnknownElement: return TM_E_UNKNOWN_ELEMENT;
    case ErrorCode::DisconnectedRegion: return TM_E_DISCONNECTED_REGION;
    case ErrorCode::DuplicateEvent: return TM_E_DUPLICATE_EVENT;
    case ErrorCode::UnknownEvent: return TM_E_UNKNOWN_EVENT;
    case ErrorCode::ContainmentViolation: return TM_E_CONTAINMENT;
    case ErrorCode::EmptyGraph: return TM_E_EMPTY_GRAPH;
    case ErrorCode::RunCapExceeded: return TM_E_RUN_CAP;
    case ErrorCode::Divergence: return TM_E_DIVERGENCE;
    case ErrorCode::DivisionByZero: return TM_E_DIVISION_BY_ZERO;
    case ErrorCode::InvalidRule: return TM_E_INVALID_RULE;
    case ErrorCode::Domain: return TM_E_DOMAIN;
    case ErrorCode::EmptyObservation: return TM_E_EMPTY_OBSERVATION;
    }
    return TM_E_INTERNAL;
}

tm_status fail(tm_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

template <typename F>
tm_status guarded(F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(TM_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(TM_E_INTERNAL, e.what());
    }
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void give(char** out, const std::string& s) {
    if (out) *out = dup(s);
}

#define TM_REQUIRE(cond, what) \
    if (!(cond)) return fail(TM_E_INVALID_ARGUMENT, what)

#define TM_REQUIRE_PARSED(doc) \
    if (!(doc)->parsed.ok()) return fail(TM_E_PARSE, "document did not parse")

std::string diagnostics_text(const tm_document& doc) {
    std::string out;
    for (const ParseDiagnostic& d : doc.parsed.diagnostics) out += d.to_text(doc.origin) + "\n";
    return out;
}

tm_status finish_parse(tm_document* doc, tm_document** out) {
    *out = doc;
    if (!doc->parsed.ok()) {
        std::string first;
        for (const ParseDiagnostic& d : doc->parsed.diagnostics)
            if (d.severity == Severity::Error) {
                first = d.to_text(doc->origin);
                break;
            }
        return fail(TM_E_PARSE, first);
    }
    return TM_OK;
}

std::vector<std::string> split_ids(const char* text) {
    std::vector<std::string> out;
    std::string cur;
    for (const char* p = text; p && *p; ++p) {
        const char c = *p;
        if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> outcome_events(const tm_batch& batch, const char* outcomes) {
    std::vector<std::string> ids = split_ids(outcomes);
    if (!ids.empty()) return ids;
    if (batch.workspace.graph && !batch.workspace.graph->spec().exclusive_groups.empty())
        return batch.workspace.graph->spec().exclusive_groups.front();
    throw Error(ErrorCode::InvalidArgument, "no outcome events given and the behavior has no exclusive group");
}

std::string join(const std::vector<std::string>& ids, char sep = ' ') {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += ids[i];
    }
    return out;
}

}  // namespace

extern "C" {

const char* tm_last_error(void) { return last_error.c_str(); }

const char* tm_status_name(tm_status status) {
    switch (status) {
    case TM_OK: return "ok";
    case TM_E_INVALID_ARGUMENT: return "invalid argument";
    case TM_E_IO: return "i/o error";
    case TM_E_PARSE: return "parse error";
    case TM_E_UNKNOWN_ELEMENT: return "unknown element";
    case TM_E_DISCONNECTED_REGION: return "disconnected region";
    case TM_E_DUPLICATE_EVENT: return "duplicate event";
    case TM_E_UNKNOWN_EVENT: return "unknown event";
    case TM_E_CONTAINMENT: return "containment violation";
    case TM_E_EMPTY_GRAPH: return "empty graph";
    case TM_E_RUN_CAP: return "run cap exceeded";
    case TM_E_DIVERGENCE: return "divergence";
    case TM_E_DIVISION_BY_ZERO: return "division by zero";
    case TM_E_INVALID_RULE: return "invalid rule";
    case TM_E_DOMAIN: return "domain error";
    case TM_E_EMPTY_OBSERVATION: return "empty observation";
    case TM_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* tm_version(void) { return "0.1.0"; }

void tm_string_free(char* text) { std::free(text); }

tm_status tm_document_parse(const char* text, const char* origin, int strict, tm_document** out) {
    TM_REQUIRE(text && out, "text and out are required");
    *out = nullptr;
    return guarded([&] {
        auto doc = std::make_unique<tm_document>();
        doc->origin = origin ? origin : "<inline>";
        ParseOptions options;
        options.strict_references = strict != 0;
        doc->parsed = parse({text, doc->origin}, options);
        return finish_parse(doc.release(), out);
    });
}

tm_status tm_document_load(const char* path, int strict, tm_document** out) {
    TM_REQUIRE(path && out, "path and out are required");
    *out = nullptr;
    return guarded([&] {
        SourceText source = read_source(path);
        auto doc = std::make_unique<tm_document>();
        doc->origin = source.origin;
        ParseOptions options;
        options.strict_references = strict != 0;
        doc->parsed = parse(source, options);
        return finish_parse(doc.release(), out);
    });
}

void tm_document_free(tm_document* doc) { delete doc; }

int tm_document_ok(const tm_document* doc) { return doc && doc->parsed.ok() ? 1 : 0; }

tm_status tm_document_diagnostics(const tm_document* doc, char** text) {
    TM_REQUIRE(doc && text, "document and text are required");
    return guarded([&] {
        give(text, diagnostics_text(*doc));
        return TM_OK;
    });
}

tm_status tm_document_serialize(const tm_document* doc, char** text) {
    TM_REQUIRE(doc && text, "document and text are required");
    TM_REQUIRE_PARSED(doc);
    return guarded([&] {
        give(text, serialize(*doc->parsed.document));
        return TM_OK;
    });
}

tm_status tm_document_census(const tm_document* doc, tm_census* out) {
    TM_REQUIRE(doc && out, "document and out are required");
    TM_REQUIRE_PARSED(doc);
    const Census c = element_census(doc->parsed.document->model);
    *out = {c.thimacs, c.stages, c.flows, c.triggers, c.variables, c.rules, doc->parsed.document->events.size()};
    return TM_OK;
}

tm_status tm_document_replace_rules(tm_document* doc, const char* rules) {
    TM_REQUIRE(doc && rules, "document and rules are required");
    TM_REQUIRE_PARSED(doc);
    return guarded([&] {
        ParseOptions lenient;
        lenient.strict_references = false;
        ParseResult extra = parse({"model rules {\n" + std::string(rules) + "\n}\n", "<rules>"}, lenient);
        if (!extra.ok()) {
            std::string msg;
            for (const ParseDiagnostic& d : extra.diagnostics)
                if (d.severity == Severity::Error) msg += d.to_text("<rules>") + "\n";
            return fail(TM_E_PARSE, msg);
        }
        const Model& m = extra.document->model;
        if (!m.thimacs.empty() || !m.stages.empty() || !m.flows.empty() || !m.triggers.empty() ||
            !m.variables.empty() || !extra.document->events.empty() || !extra.document->behavior.empty())
            return fail(TM_E_INVALID_ARGUMENT, "rule overrides may only contain rule declarations");
        // Re-resolve outcome shorthands against the full model.
        Document merged = *doc->parsed.document;
        for (const UpdateRule& r : m.rules)
            std::erase_if(merged.model.rules, [&](const UpdateRule& old) { return old.stage == r.stage; });
        std::string base = serialize(merged);
        base.insert(base.rfind('}'), std::string(rules) + "\n");
        ParseResult reparsed = parse({base, doc->origin}, {});
        if (!reparsed.ok()) {
            std::string msg;
            for (const ParseDiagnostic& d : reparsed.diagnostics)
                if (d.severity == Severity::Error) msg += d.to_text("<rules>") + "\n";
            return fail(TM_E_PARSE, msg);
        }
        doc->parsed = std::move(reparsed);
        doc->workspace.reset();
        return TM_OK;
    });
}

tm_status tm_validate(const tm_document* doc, size_t* violations, char** report) {
    TM_REQUIRE(doc, "document is required");
    if (!doc->parsed.ok()) return fail(TM_E_PARSE, diagnostics_text(*doc));
    return guarded([&] {
        const ValidationReport r = validate_static(doc->parsed.document->model);
        std::string text = r.to_text();
        std::size_t count = r.violations.size();
        if (r.ok()) {
            try {
                doc->assembled();
            } catch (const Error& e) {
                text += std::string("events: ") + e.what() + "\n";
                ++count;
            }
        }
        if (violations) *violations = count;
        give(report, text);
        return TM_OK;
    });
}

tm_status tm_decompose(const tm_document* doc, size_t* uncovered, char** report) {
    TM_REQUIRE(doc, "document is required");
    return guarded([&] {
        const Workspace& ws = doc->assembled();
        std::ostringstream out;
        for (const Event& e : ws.catalog->events()) {
            out << e.id << "\t" << e.description << (e.data_emitting ? "\t[emits]" : "") << "\n";
            out << "  region " << e.region.elements.size() << ":";
            for (const std::string& id : e.region.elements) out << ' ' << id;
            out << "\n";
        }
        out << "states\n";
        for (const StateDescription& s : states_of(*ws.catalog)) out << "  " << s.event << "\t" << s.text << "\n";
        const Coverage c = coverage_check(*ws.catalog);
        out << c.to_text();
        if (uncovered) *uncovered = c.uncovered.size();
        give(report, out.str());
        return TM_OK;
    });
}

tm_status tm_behavior_runs(const tm_document* doc, size_t max_recurrence, size_t max_runs, size_t* count,
                           char** text) {
    TM_REQUIRE(doc, "document is required");
    return guarded([&] {
        const Workspace& ws = doc->assembled();
        if (!ws.graph) return fail(TM_E_EMPTY_GRAPH, "model declares no events");
        EnumerateOptions options;
        options.max_recurrence = max_recurrence;
        options.max_runs = max_runs;
        const std::vector<Run> runs = enumerate_runs(*ws.graph, options);
        std::ostringstream out;
        out << "initial " << join(ws.graph->initial()) << "\n";
        out << "terminal " << join(ws.graph->terminal()) << "\n";
        out << "runs " << runs.size() << "\n";
        for (std::size_t i = 0; i < runs.size(); ++i) out << (i + 1) << "\t" << join(runs[i]) << "\n";
        if (count) *count = runs.size();
        give(text, out.str());
        return TM_OK;
    });
}

tm_status tm_behavior_conforms(const tm_document* doc, const char* events, int* conformant, char** verdict) {
    TM_REQUIRE(doc && events, "document and events are required");
    return guarded([&] {
        const Workspace& ws = doc->assembled();
        if (!ws.graph) return fail(TM_E_EMPTY_GRAPH, "model declares no events");
        const Verdict v = conforms(split_ids(events), *ws.graph);
        if (conformant) *conformant = v.conformant ? 1 : 0;
        give(verdict, v.to_text());
        return TM_OK;
    });
}

tm_status tm_render(const tm_document* doc, tm_render_target target, int show_triggers, int cluster_thimacs,
                    char** dot) {
    TM_REQUIRE(doc && dot, "document and dot are required");
    return guarded([&] {
        RenderOptions options;
        options.show_triggers = show_triggers != 0;
        options.cluster_thimacs = cluster_thimacs != 0;
        switch (target) {
        case TM_RENDER_STATIC: options.target = RenderTarget::Static; break;
        case TM_RENDER_EVENTS: options.target = RenderTarget::EventsOverlay; break;
        case TM_RENDER_BEHAVIOR: options.target = RenderTarget::Behavior; break;
        default: return fail(TM_E_INVALID_ARGUMENT, "unknown render target");
        }
        if (target == TM_RENDER_STATIC) {
            if (!doc->parsed.ok()) return fail(TM_E_PARSE, "document did not parse");
            give(dot, render_model(doc->parsed.document->model, options));
            return TM_OK;
        }
        give(dot, render(doc->assembled(), options));
        return TM_OK;
    });
}

tm_config* tm_config_new(void) { return new (std::nothrow) tm_config{}; }

void tm_config_free(tm_config* config) { delete config; }

tm_status tm_config_set_seed(tm_config* config, uint64_t seed) {
    TM_REQUIRE(config, "config is required");
    config->config.seed = seed;
    return TM_OK;
}

tm_status tm_config_set_max_ticks(tm_config* config, uint64_t max_ticks) {
    TM_REQUIRE(config, "config is required");
    config->config.max_ticks = max_ticks;
    return TM_OK;
}

tm_status tm_config_set_id_sorted(tm_config* config, int id_sorted) {
    TM_REQUIRE(config, "config is required");
    config->config.firing_order = id_sorted ? FiringOrder::IdSorted : FiringOrder::Declaration;
    return TM_OK;
}

tm_status tm_config_set_max_in_flight(tm_config* config, size_t max_in_flight) {
    TM_REQUIRE(config, "config is required");
    config->config.max_in_flight = max_in_flight;
    return TM_OK;
}

tm_status tm_config_set_value(tm_config* config, const char* variable, double value) {
    TM_REQUIRE(config && variable && *variable, "config and variable are required");
    return guarded([&] {
        config->config.overrides[variable] = value;
        return TM_OK;
    });
}

tm_status tm_simulate(const tm_document* doc, const tm_config* config, size_t runs, unsigned threads,
                      tm_batch** out) {
    TM_REQUIRE(doc && out, "document and out are required");
    TM_REQUIRE(runs > 0, "runs must be positive");
    *out = nullptr;
    return guarded([&] {
        const Workspace& ws = doc->assembled();
        if (!ws.graph) return fail(TM_E_EMPTY_GRAPH, "model declares no events");
        auto batch = std::make_unique<tm_batch>();
        batch->workspace = ws;
        batch->config = config ? config->config : EngineConfig{};
        batch->traces = run_batch(*ws.model, *ws.catalog, *ws.graph, batch->config, runs, threads);
        for (const Trace& t : batch->traces) batch->events.push_back(trace_events(t, *ws.graph));
        *out = batch.release();
        return TM_OK;
    });
}

void tm_batch_free(tm_batch* batch) { delete batch; }

size_t tm_batch_size(const tm_batch* batch) { return batch ? batch->traces.size() : 0; }

tm_status tm_batch_trace_tsv(const tm_batch* batch, char** text) {
    TM_REQUIRE(batch && text, "batch and text are required");
    return guarded([&] {
        std::string out = "# tmkit-trace model=" + batch->workspace.model->name +
                          " runs=" + std::to_string(batch->traces.size()) + "\n";
        out += "# tick\tstage\tthing\tevent\tvariables\n";
        for (std::size_t i = 0; i < batch->traces.size(); ++i) {
            out += "# run " + std::to_string(i) + " seed " + std::to_string(batch->traces[i].seed) + "\n";
            out += trace_to_tsv(batch->traces[i], false);
        }
        give(text, out);
        return TM_OK;
    });
}

tm_status tm_batch_trace_jsonl(const tm_batch* batch, char** text) {
    TM_REQUIRE(batch && text, "batch and text are required");
    return guarded([&] {
        std::string out;
        for (std::size_t i = 0; i < batch->traces.size(); ++i) {
            const std::string lines = trace_to_jsonl(batch->traces[i]);
            const std::string prefix =
                "{\"run\":" + std::to_string(i) + ",\"seed\":" + std::to_string(batch->traces[i].seed) + ",";
            std::size_t start = 0;
            while (start < lines.size()) {
                const std::size_t end = lines.find('\n', start);
                out += prefix + lines.substr(start + 1, end - start - 1) + "\n";
                start = end + 1;
            }
        }
        give(text, out);
        return TM_OK;
    });
}

tm_status tm_batch_events(const tm_batch* batch, char** text) {
    TM_REQUIRE(batch && text, "batch and text are required");
    return guarded([&] {
        std::string out;
        for (std::size_t i = 0; i < batch->traces.size(); ++i)
            out += std::to_string(batch->traces[i].seed) + "\t" + join(batch->events[i].sequence) + "\n";
        give(text, out);
        return TM_OK;
    });
}

tm_status tm_batch_verdicts(const tm_batch* batch, size_t* nonconformant, char** text) {
    TM_REQUIRE(batch, "batch is required");
    return guarded([&] {
        std::string out;
        std::size_t bad = 0;
        for (std::size_t i = 0; i < batch->traces.size(); ++i) {
            const Verdict& v = batch->events[i].verdict;
            if (!v.conformant) ++bad;
            out += std::to_string(batch->traces[i].seed) + "\t" + v.to_text();
        }
        if (nonconformant) *nonconformant = bad;
        give(text, out);
        return TM_OK;
    });
}

tm_status tm_batch_ticks_tsv(const tm_batch* batch, size_t run, char** text) {
    TM_REQUIRE(batch && text, "batch and text are required");
    TM_REQUIRE(run < batch->traces.size(), "run index out of range");
    return guarded([&] {
        give(text, ticks_to_tsv(batch->traces[run]));
        return TM_OK;
    });
}

tm_status tm_batch_warnings(const tm_batch* batch, size_t* count, char** text) {
    TM_REQUIRE(batch, "batch is required");
    return guarded([&] {
        std::string out;
        std::size_t n = 0;
        for (const Trace& t : batch->traces)
            for (const std::string& w : t.warnings) {
                out += "seed " + std::to_string(t.seed) + ": " + w + "\n";
                ++n;
            }
        if (count) *count = n;
        give(text, out);
        return TM_OK;
    });
}

tm_status tm_batch_info(const tm_batch* batch, const char* outcomes, double base, char** text, char** json) {
    TM_REQUIRE(batch, "batch is required");
    return guarded([&] {
        std::vector<std::string> all;
        for (const TraceEvents& e : batch->events) all.insert(all.end(), e.sequence.begin(), e.sequence.end());
        const InfoReport r = empirical_info(all, outcome_events(*batch, outcomes), base);
        give(text, r.to_text());
        give(json, r.to_json());
        return TM_OK;
    });
}

tm_status tm_batch_summary(const tm_batch* batch, const char* outcomes, char** text) {
    TM_REQUIRE(batch && text, "batch and text are required");
    return guarded([&] {
        std::ostringstream out;
        std::size_t conformant = 0, warnings = 0, ticks = 0, entries = 0;
        for (std::size_t i = 0; i < batch->traces.size(); ++i) {
            if (batch->events[i].verdict.conformant) ++conformant;
            warnings += batch->traces[i].warnings.size();
            ticks += batch->traces[i].ticks.size();
            entries += batch->traces[i].entries.size();
        }
        out << "model\t" << batch->workspace.model->name << "\n";
        out << "runs\t" << batch->traces.size() << "\n";
        out << "first_seed\t" << batch->config.seed << "\n";
        out << "conformant\t" << conformant << "\n";
        out << "nonconformant\t" << batch->traces.size() - conformant << "\n";
        out << "warnings\t" << warnings << "\n";
        out << "ticks\t" << ticks << "\n";
        out << "firings\t" << entries << "\n";
        std::vector<std::string> ids;
        try {
            ids = outcome_events(*batch, outcomes);
        } catch (const Error&) {
        }
        for (const std::string& id : ids) {
            std::size_t n = 0;
            for (const TraceEvents& e : batch->events) n += std::count(e.sequence.begin(), e.sequence.end(), id);
            out << "outcome\t" << id << "\t" << n << "\n";
        }
        give(text, out.str());
        return TM_OK;
    });
}

tm_status tm_self_information(double p, double base, double* out) {
    TM_REQUIRE(out, "out is required");
    return guarded([&] {
        *out = self_information(p, base);
        return TM_OK;
    });
}

tm_status tm_entropy(const double* probabilities, size_t n, double base, double* out) {
    TM_REQUIRE(out && (probabilities || n == 0), "probabilities and out are required");
    return guarded([&] {
        std::vector<Distribution::Outcome> outcomes;
        for (size_t i = 0; i < n; ++i) outcomes.push_back({"x" + std::to_string(i), probabilities[i]});
        *out = entropy(Distribution(std::move(outcomes)), base);
        return TM_OK;
    });
}

tm_status tm_info_report(const char* const* labels, const double* probabilities, size_t n, double base,
                         char** text, char** json) {
    TM_REQUIRE((labels && probabilities) || n == 0, "labels and probabilities are required");
    return guarded([&] {
        std::vector<Distribution::Outcome> outcomes;
        for (size_t i = 0; i < n; ++i) {
            if (!labels[i]) return fail(TM_E_INVALID_ARGUMENT, "null label");
            outcomes.push_back({labels[i], probabilities[i]});
        }
        const InfoReport r = info_report(Distribution(std::move(outcomes)), base);
        give(text, r.to_text());
        give(json, r.to_json());
        return TM_OK;
    });
}

size_t tm_bundled_count(void) { return bundled_models().size(); }

tm_status tm_bundled_model(size_t index, const char** name, const char** file, const char** provenance) {
    TM_REQUIRE(index < bundled_models().size(), "bundled model index out of range");
    const BundledModel& m = bundled_models()[index];
    if (name) *name = m.name.c_str();
    if (file) *file = m.file.c_str();
    if (provenance) *provenance = m.provenance.c_str();
    return TM_OK;
}

}  // extern "C"
