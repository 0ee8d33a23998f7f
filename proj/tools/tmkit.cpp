#include "tmkit/tmkit.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, failed = 1, input_error = 2, engine_error = 3 };

int exit_for(tm_status s) {
    switch (s) {
    case TM_OK: return ok;
    case TM_E_RUN_CAP:
    case TM_E_DIVERGENCE:
    case TM_E_DIVISION_BY_ZERO:
    case TM_E_INVALID_RULE:
    case TM_E_DOMAIN:
    case TM_E_EMPTY_OBSERVATION:
    case TM_E_INTERNAL:
        return engine_error;
    default:
        return input_error;
    }
}

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Library failure carrying the status so main can pick the exit code.
struct LibError : std::runtime_error {
    LibError(tm_status s, const std::string& what) : std::runtime_error(what), status(s) {}
    tm_status status;
};

void check(tm_status s) {
    if (s != TM_OK) throw LibError(s, std::string(tm_status_name(s)) + ": " + tm_last_error());
}

struct Text {
    char* p = nullptr;
    ~Text() { tm_string_free(p); }
    char** out() { return &p; }
    std::string str() const { return p ? p : ""; }
};

struct DocDeleter {
    void operator()(tm_document* d) const { tm_document_free(d); }
};
struct ConfigDeleter {
    void operator()(tm_config* c) const { tm_config_free(c); }
};
struct BatchDeleter {
    void operator()(tm_batch* b) const { tm_batch_free(b); }
};
using Doc = std::unique_ptr<tm_document, DocDeleter>;
using Config = std::unique_ptr<tm_config, ConfigDeleter>;
using Batch = std::unique_ptr<tm_batch, BatchDeleter>;

fs::path models_dir() {
    if (const char* env = std::getenv("TMKIT_MODELS_DIR"); env && *env) return env;
#ifdef TMKIT_MODELS_DIR
    return TMKIT_MODELS_DIR;
#else
    return "models";
#endif
}

// A path on disk, or the name of a bundled model.
std::string resolve_model(const std::string& arg) {
    if (fs::is_regular_file(arg)) return arg;
    for (size_t i = 0; i < tm_bundled_count(); ++i) {
        const char* name = nullptr;
        const char* file = nullptr;
        tm_bundled_model(i, &name, &file, nullptr);
        if (arg == name || arg == file) return (models_dir() / file).string();
    }
    return arg;
}

Doc load(const std::string& arg, bool strict) {
    tm_document* raw = nullptr;
    const tm_status s = tm_document_load(resolve_model(arg).c_str(), strict ? 1 : 0, &raw);
    Doc doc(raw);
    if (s == TM_E_PARSE && doc) {
        Text diag;
        tm_document_diagnostics(doc.get(), diag.out());
        std::cerr << diag.str();
        throw LibError(s, "parse failed");
    }
    check(s);
    return doc;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw InputError("cannot write '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double parse_base(const std::string& text) {
    if (text == "2") return 2.0;
    if (text == "10") return 10.0;
    if (text == "e") return std::exp(1.0);
    throw InputError("base must be 2, e or 10");
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size() || text.front() == '-') throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw InputError(what + " must be a non-negative integer, got '" + text + "'");
    }
}

struct SimOptions {
    std::string model;
    std::string manifest;
    std::string seed;
    std::uint64_t max_ticks = 1000;
    std::size_t runs = 1;
    unsigned threads = 1;
    std::vector<std::string> set;
    std::string outcomes;
    std::string firing_order = "declaration";
    std::size_t max_in_flight = 100000;
    std::string rules;
    std::string output;
    std::string base = "2";
};

struct SimFlags {
    CLI::Option* model = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* max_ticks = nullptr;
    CLI::Option* runs = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* set = nullptr;
    CLI::Option* outcomes = nullptr;
    CLI::Option* firing_order = nullptr;
    CLI::Option* max_in_flight = nullptr;
    CLI::Option* rules = nullptr;
    CLI::Option* output = nullptr;
};

void add_sim_options(CLI::App* cmd, SimOptions& o, SimFlags& f) {
    f.model = cmd->add_option("model", o.model, "Model file or bundled model name");
    cmd->add_option("--manifest", o.manifest, "JSON run manifest; flags override its fields");
    f.seed = cmd->add_option("--seed", o.seed, "Seed (default: TMKIT_SEED or 0)");
    f.max_ticks = cmd->add_option("--max-ticks", o.max_ticks, "Tick limit per run");
    f.runs = cmd->add_option("--runs", o.runs, "Number of independent runs");
    f.threads = cmd->add_option("--threads", o.threads, "Worker threads for batch runs");
    f.set = cmd->add_option("--set", o.set, "Initial value override var=value (repeatable)");
    f.outcomes = cmd->add_option("--outcomes", o.outcomes, "Comma separated outcome events");
    f.firing_order = cmd->add_option("--firing-order", o.firing_order, "declaration or id")
                         ->check(CLI::IsMember({"declaration", "id"}));
    f.max_in_flight = cmd->add_option("--max-in-flight", o.max_in_flight, "Divergence guard");
    f.rules = cmd->add_option("--rules", o.rules, "File of rule declarations replacing the model's");
    f.output = cmd->add_option("-o,--output", o.output, "Output directory");
}

// Fills fields the user did not pass on the command line from the manifest.
void apply_manifest(SimOptions& o, const SimFlags& f, std::string& inline_rules) {
    if (o.manifest.empty()) return;
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(read_file(o.manifest));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("manifest '" + o.manifest + "': " + e.what());
    }
    if (!m.is_object()) throw InputError("manifest must be a JSON object");
    const fs::path base = fs::path(o.manifest).parent_path();
    auto rel = [&](const std::string& p) {
        if (fs::path(p).is_absolute()) return p;
        return (base / p).string();
    };
    try {
        if (!f.model->count() && m.contains("model")) {
            const std::string p = m["model"].get<std::string>();
            o.model = fs::is_regular_file(base / p) ? (base / p).string() : p;
        }
        const nlohmann::json& cfg = m.contains("config") ? m["config"] : m;
        if (!f.seed->count() && cfg.contains("seed")) o.seed = std::to_string(cfg["seed"].get<std::uint64_t>());
        if (!f.max_ticks->count() && cfg.contains("max_ticks")) o.max_ticks = cfg["max_ticks"].get<std::uint64_t>();
        if (!f.runs->count() && m.contains("runs")) o.runs = m["runs"].get<std::size_t>();
        if (!f.threads->count() && m.contains("threads")) o.threads = m["threads"].get<unsigned>();
        if (!f.firing_order->count() && cfg.contains("firing_order"))
            o.firing_order = cfg["firing_order"].get<std::string>();
        if (!f.max_in_flight->count() && cfg.contains("max_in_flight"))
            o.max_in_flight = cfg["max_in_flight"].get<std::size_t>();
        if (!f.set->count() && cfg.contains("set"))
            for (const auto& [k, v] : cfg["set"].items()) {
                std::ostringstream s;
                s.precision(17);
                s << k << '=' << v.get<double>();
                o.set.push_back(s.str());
            }
        if (!f.outcomes->count() && m.contains("outcomes")) {
            if (m["outcomes"].is_array()) {
                for (const auto& id : m["outcomes"])
                    o.outcomes += (o.outcomes.empty() ? "" : ",") + id.get<std::string>();
            } else {
                o.outcomes = m["outcomes"].get<std::string>();
            }
        }
        if (!f.rules->count()) {
            if (m.contains("rules_file")) o.rules = rel(m["rules_file"].get<std::string>());
            if (m.contains("rules")) inline_rules = m["rules"].get<std::string>();
        }
        if (!f.output->count() && m.contains("output")) o.output = rel(m["output"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError("manifest '" + o.manifest + "': " + e.what());
    }
    if (o.firing_order != "declaration" && o.firing_order != "id")
        throw InputError("firing_order must be 'declaration' or 'id'");
}

Config make_config(const SimOptions& o) {
    Config cfg(tm_config_new());
    if (!cfg) throw LibError(TM_E_INTERNAL, "out of memory");
    std::uint64_t seed = 0;
    if (!o.seed.empty()) {
        seed = parse_u64(o.seed, "seed");
    } else if (const char* env = std::getenv("TMKIT_SEED"); env && *env) {
        seed = parse_u64(env, "TMKIT_SEED");
    }
    check(tm_config_set_seed(cfg.get(), seed));
    check(tm_config_set_max_ticks(cfg.get(), o.max_ticks));
    check(tm_config_set_id_sorted(cfg.get(), o.firing_order == "id"));
    check(tm_config_set_max_in_flight(cfg.get(), o.max_in_flight));
    for (const std::string& kv : o.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--set expects var=value, got '" + kv + "'");
        double v = 0.0;
        try {
            size_t used = 0;
            v = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError("--set value is not a number in '" + kv + "'");
        }
        check(tm_config_set_value(cfg.get(), kv.substr(0, eq).c_str(), v));
    }
    return cfg;
}

Batch simulate(const SimOptions& o, const std::string& inline_rules, Doc& doc) {
    if (o.model.empty()) throw InputError("no model given");
    if (o.runs == 0) throw InputError("runs must be positive");
    doc = load(o.model, true);
    if (!o.rules.empty()) check(tm_document_replace_rules(doc.get(), read_file(o.rules).c_str()));
    if (!inline_rules.empty()) check(tm_document_replace_rules(doc.get(), inline_rules.c_str()));
    Config cfg = make_config(o);
    tm_batch* raw = nullptr;
    check(tm_simulate(doc.get(), cfg.get(), o.runs, o.threads, &raw));
    return Batch(raw);
}

int cmd_validate(const std::string& model) {
    Doc doc = load(model, false);
    Text diag;
    check(tm_document_diagnostics(doc.get(), diag.out()));
    std::cerr << diag.str();
    size_t violations = 0;
    Text report;
    check(tm_validate(doc.get(), &violations, report.out()));
    std::cout << (violations == 0 ? std::string("no violations\n") : report.str());
    return violations == 0 ? ok : failed;
}

int cmd_decompose(const std::string& model) {
    Doc doc = load(model, true);
    size_t uncovered = 0;
    Text report;
    check(tm_decompose(doc.get(), &uncovered, report.out()));
    std::cout << report.str();
    return uncovered == 0 ? ok : failed;
}

int cmd_behavior(const std::string& model, size_t max_recurrence, size_t max_runs, const std::string& trace) {
    Doc doc = load(model, true);
    if (!trace.empty()) {
        int conformant = 0;
        Text verdict;
        check(tm_behavior_conforms(doc.get(), trace.c_str(), &conformant, verdict.out()));
        std::cout << verdict.str();
        return conformant ? ok : failed;
    }
    size_t count = 0;
    Text runs;
    check(tm_behavior_runs(doc.get(), max_recurrence, max_runs, &count, runs.out()));
    std::cout << runs.str();
    return ok;
}

int cmd_examples(bool paths) {
    for (size_t i = 0; i < tm_bundled_count(); ++i) {
        const char* name = nullptr;
        const char* file = nullptr;
        const char* provenance = nullptr;
        check(tm_bundled_model(i, &name, &file, &provenance));
        std::cout << name << '\t' << (paths ? (models_dir() / file).string() : std::string(file)) << '\t'
                  << provenance << '\n';
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tmkit: thinging machine models, events, behavior and simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tm_version()));

    std::string model;
    auto* validate = app.add_subcommand("validate", "Check a model against the static rules");
    validate->add_option("model", model, "Model file or bundled model name")->required();

    auto* decompose = app.add_subcommand("decompose", "List events, their regions and coverage");
    decompose->add_option("model", model, "Model file or bundled model name")->required();

    size_t max_recurrence = 0;
    size_t max_runs = 100000;
    std::string check_trace;
    auto* behavior = app.add_subcommand("behavior", "Enumerate runs or check an event sequence");
    behavior->add_option("model", model, "Model file or bundled model name")->required();
    behavior->add_option("--max-recurrence", max_recurrence, "Times each recurrence may be unrolled");
    behavior->add_option("--max-runs", max_runs, "Abort when more runs than this exist");
    behavior->add_option("--check", check_trace, "Event sequence to check, e.g. \"E1 E2 E3\"");

    SimOptions sim;
    SimFlags sim_flags;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the engine and write traces");
    add_sim_options(simulate_cmd, sim, sim_flags);
    simulate_cmd->add_option("--base", sim.base, "Logarithm base for the info report: 2, e or 10");

    SimOptions info_sim;
    SimFlags info_flags;
    std::string dist;
    bool json_out = false;
    auto* info = app.add_subcommand("info", "Information measures of a distribution or of simulated outcomes");
    add_sim_options(info, info_sim, info_flags);
    info->add_option("--dist", dist, "Distribution label=p,label=p,...");
    info->add_option("--base", info_sim.base, "Logarithm base: 2, e or 10");
    info->add_flag("--json", json_out, "Print JSON instead of text");

    std::string target = "static";
    std::string out_file;
    bool no_triggers = false;
    bool no_clusters = false;
    auto* render = app.add_subcommand("render", "Write DOT for the model, its events or its behavior");
    render->add_option("model", model, "Model file or bundled model name")->required();
    render->add_option("--target", target, "static, events or behavior")
        ->check(CLI::IsMember({"static", "events", "behavior"}));
    render->add_option("-o,--output", out_file, "Output file (default: standard output)");
    render->add_flag("--no-triggers", no_triggers, "Omit trigger edges");
    render->add_flag("--no-clusters", no_clusters, "Do not group stages by thimac");

    bool show_paths = false;
    auto* examples = app.add_subcommand("examples", "List the bundled models");
    examples->add_flag("--paths", show_paths, "Print absolute model paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : input_error;
    }

    try {
        if (validate->parsed()) return cmd_validate(model);
        if (decompose->parsed()) return cmd_decompose(model);
        if (behavior->parsed()) return cmd_behavior(model, max_recurrence, max_runs, check_trace);
        if (examples->parsed()) return cmd_examples(show_paths);

        if (render->parsed()) {
            Doc doc = load(model, true);
            const tm_render_target t = target == "events"     ? TM_RENDER_EVENTS
                                       : target == "behavior" ? TM_RENDER_BEHAVIOR
                                                              : TM_RENDER_STATIC;
            Text dot;
            check(tm_render(doc.get(), t, no_triggers ? 0 : 1, no_clusters ? 0 : 1, dot.out()));
            if (out_file.empty())
                std::cout << dot.str();
            else
                write_file(out_file, dot.str());
            return ok;
        }

        if (simulate_cmd->parsed()) {
            std::string inline_rules;
            apply_manifest(sim, sim_flags, inline_rules);
            const double base = parse_base(sim.base);
            Doc doc;
            Batch batch = simulate(sim, inline_rules, doc);
            const char* outcomes = sim.outcomes.empty() ? nullptr : sim.outcomes.c_str();

            size_t nonconformant = 0;
            Text verdicts, summary, warnings, events;
            size_t warning_count = 0;
            check(tm_batch_verdicts(batch.get(), &nonconformant, verdicts.out()));
            check(tm_batch_summary(batch.get(), outcomes, summary.out()));
            check(tm_batch_warnings(batch.get(), &warning_count, warnings.out()));
            check(tm_batch_events(batch.get(), events.out()));
            std::cerr << warnings.str();

            Text info_text, info_json;
            std::string info_note;
            const tm_status info_status = tm_batch_info(batch.get(), outcomes, base, info_text.out(), info_json.out());
            if (info_status == TM_E_INVALID_ARGUMENT || info_status == TM_E_EMPTY_OBSERVATION)
                info_note = std::string("no information report: ") + tm_last_error() + "\n";
            else
                check(info_status);

            if (!sim.output.empty()) {
                const fs::path dir = sim.output;
                std::error_code ec;
                fs::create_directories(dir, ec);
                if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());
                Text tsv, jsonl, ticks;
                check(tm_batch_trace_tsv(batch.get(), tsv.out()));
                check(tm_batch_trace_jsonl(batch.get(), jsonl.out()));
                check(tm_batch_ticks_tsv(batch.get(), 0, ticks.out()));
                write_file(dir / "trace.tsv", tsv.str());
                write_file(dir / "trace.jsonl", jsonl.str());
                write_file(dir / "events.txt", events.str());
                write_file(dir / "verdict.txt", verdicts.str());
                write_file(dir / "variables.tsv", ticks.str());
                write_file(dir / "summary.txt", summary.str());
                write_file(dir / "info.txt", info_note.empty() ? info_text.str() : info_note);
                write_file(dir / "info.json", info_note.empty() ? info_json.str() : "null\n");
            }
            std::cout << summary.str();
            if (tm_batch_size(batch.get()) == 1) std::cout << "events\t" << events.str().substr(events.str().find('\t') + 1);
            std::cout << (info_note.empty() ? info_text.str() : info_note);
            return nonconformant == 0 ? ok : failed;
        }

        if (info->parsed()) {
            const double base = parse_base(info_sim.base);
            Text text, json;
            if (!dist.empty()) {
                std::vector<std::string> labels;
                std::vector<double> probs;
                std::stringstream ss(dist);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto eq = item.find('=');
                    if (eq == std::string::npos || eq == 0) throw InputError("--dist expects label=p, got '" + item + "'");
                    labels.push_back(item.substr(0, eq));
                    try {
                        size_t used = 0;
                        probs.push_back(std::stod(item.substr(eq + 1), &used));
                        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
                    } catch (const std::exception&) {
                        throw InputError("probability is not a number in '" + item + "'");
                    }
                }
                std::vector<const char*> ptrs;
                for (const std::string& l : labels) ptrs.push_back(l.c_str());
                const tm_status s = tm_info_report(ptrs.data(), probs.data(), ptrs.size(), base, text.out(), json.out());
                if (s == TM_E_DOMAIN) throw LibError(TM_E_INVALID_ARGUMENT, std::string("invalid distribution: ") + tm_last_error());
                check(s);
            } else {
                std::string inline_rules;
                apply_manifest(info_sim, info_flags, inline_rules);
                Doc doc;
                Batch batch = simulate(info_sim, inline_rules, doc);
                const char* outcomes = info_sim.outcomes.empty() ? nullptr : info_sim.outcomes.c_str();
                check(tm_batch_info(batch.get(), outcomes, base, text.out(), json.out()));
            }
            if (!info_sim.output.empty()) {
                std::error_code ec;
                fs::create_directories(info_sim.output, ec);
                write_file(fs::path(info_sim.output) / "info.txt", text.str());
                write_file(fs::path(info_sim.output) / "info.json", json.str());
            }
            std::cout << (json_out ? json.str() : text.str());
            return ok;
        }
    } catch (const LibError& e) {
        std::cerr << "tmkit: " << e.what() << '\n';
        return exit_for(e.status);
    } catch (const InputError& e) {
        std::cerr << "tmkit: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception& e) {
        std::cerr << "tmkit: " << e.what() << '\n';
        return engine_error;
    }
    return ok;
}
