#include "doctest.h"

#include "tmkit/tmkit.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>

namespace {

struct Owned {
    char* p = nullptr;
    ~Owned() { tm_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

using DocPtr = std::unique_ptr<tm_document, decltype(&tm_document_free)>;
using ConfigPtr = std::unique_ptr<tm_config, decltype(&tm_config_free)>;
using BatchPtr = std::unique_ptr<tm_batch, decltype(&tm_batch_free)>;

DocPtr bundled(const char* name) {
    tm_document* d = nullptr;
    const std::string path = std::string(TMKIT_MODELS_DIR) + "/" + name + ".tm";
    REQUIRE(tm_document_load(path.c_str(), 1, &d) == TM_OK);
    return DocPtr(d, tm_document_free);
}

DocPtr parsed(const char* text, int strict = 1) {
    tm_document* d = nullptr;
    tm_document_parse(text, "inline", strict, &d);
    return DocPtr(d, tm_document_free);
}

BatchPtr simulate(const tm_document* doc, std::uint64_t seed, std::size_t runs, std::uint64_t ticks = 1000) {
    ConfigPtr cfg(tm_config_new(), tm_config_free);
    REQUIRE(tm_config_set_seed(cfg.get(), seed) == TM_OK);
    REQUIRE(tm_config_set_max_ticks(cfg.get(), ticks) == TM_OK);
    tm_batch* b = nullptr;
    REQUIRE(tm_simulate(doc, cfg.get(), runs, 2, &b) == TM_OK);
    return BatchPtr(b, tm_batch_free);
}

}  // namespace

TEST_CASE("version, status names and bundled models") {
    CHECK(std::string(tm_version()) == "0.1.0");
    CHECK(std::string(tm_status_name(TM_OK)) == "ok");
    CHECK(std::string(tm_status_name(TM_E_PARSE)) == "parse error");
    CHECK(tm_bundled_count() == 3);
    const char *name = nullptr, *file = nullptr, *prov = nullptr;
    REQUIRE(tm_bundled_model(1, &name, &file, &prov) == TM_OK);
    CHECK(std::string(name) == "tile");
    CHECK(std::string(file) == "tile.tm");
    CHECK(tm_bundled_model(3, &name, &file, &prov) == TM_E_INVALID_ARGUMENT);
}

TEST_CASE("null arguments are rejected with a message") {
    CHECK(tm_document_parse(nullptr, "x", 1, nullptr) == TM_E_INVALID_ARGUMENT);
    CHECK(std::strlen(tm_last_error()) > 0);
    CHECK(tm_validate(nullptr, nullptr, nullptr) == TM_E_INVALID_ARGUMENT);
    CHECK(tm_config_set_seed(nullptr, 1) == TM_E_INVALID_ARGUMENT);
    tm_document_free(nullptr);
    tm_batch_free(nullptr);
    tm_config_free(nullptr);
    tm_string_free(nullptr);
}

TEST_CASE("parse failures keep their diagnostics") {
    tm_document* d = nullptr;
    CHECK(tm_document_parse("model m { thimac A { create } }", "bad.tm", 1, &d) == TM_E_PARSE);
    DocPtr doc(d, tm_document_free);
    REQUIRE(doc);
    CHECK(tm_document_ok(doc.get()) == 0);
    Owned diag;
    REQUIRE(tm_document_diagnostics(doc.get(), &diag.p) == TM_OK);
    CHECK(diag.str().rfind("bad.tm:1:", 0) == 0);
    Owned text;
    CHECK(tm_document_serialize(doc.get(), &text.p) == TM_E_PARSE);

    tm_document* missing = nullptr;
    CHECK(tm_document_load("/nonexistent.tm", 1, &missing) == TM_E_IO);
    CHECK(missing == nullptr);
}

TEST_CASE("validation of bundled models and of a broken one") {
    for (const char* name : {"predator_prey", "tile", "coin"}) {
        DocPtr doc = bundled(name);
        size_t n = 99;
        Owned report;
        REQUIRE(tm_validate(doc.get(), &n, &report.p) == TM_OK);
        CHECK(n == 0);
        CHECK(report.str().empty());
    }
    DocPtr bad = parsed("model m { thimac A { create; release; } thimac B { receive; } flow A.release -> B.receive; }", 0);
    size_t n = 0;
    Owned report;
    REQUIRE(tm_validate(bad.get(), &n, &report.p) == TM_OK);
    CHECK(n == 1);
    CHECK(report.str().rfind("TM08", 0) == 0);
}

TEST_CASE("census, serialization and decomposition") {
    DocPtr doc = bundled("tile");
    tm_census c{};
    REQUIRE(tm_document_census(doc.get(), &c) == TM_OK);
    CHECK(c.thimacs == 7);
    CHECK(c.flows == 14);
    CHECK(c.triggers == 3);
    CHECK(c.events == 10);
    Owned text;
    REQUIRE(tm_document_serialize(doc.get(), &text.p) == TM_OK);
    DocPtr again = parsed(text.p);
    REQUIRE(tm_document_ok(again.get()));
    Owned text2;
    REQUIRE(tm_document_serialize(again.get(), &text2.p) == TM_OK);
    CHECK(text.str() == text2.str());

    size_t uncovered = 9;
    Owned report;
    REQUIRE(tm_decompose(doc.get(), &uncovered, &report.p) == TM_OK);
    CHECK(uncovered == 0);
    CHECK(report.str().find("E10") != std::string::npos);
}

TEST_CASE("behavior runs and conformance through the C API") {
    DocPtr doc = bundled("tile");
    size_t count = 0;
    Owned text;
    REQUIRE(tm_behavior_runs(doc.get(), 0, 1000, &count, &text.p) == TM_OK);
    CHECK(count == 2);
    CHECK(text.str().find("runs 2\n") != std::string::npos);

    int ok = 0;
    Owned verdict;
    REQUIRE(tm_behavior_conforms(doc.get(), "E1 E2,E3", &ok, &verdict.p) == TM_OK);
    CHECK(ok == 1);
    CHECK(verdict.str() == "conformant\n");
    Owned bad;
    REQUIRE(tm_behavior_conforms(doc.get(), "E1 E3", &ok, &bad.p) == TM_OK);
    CHECK(ok == 0);
    CHECK(bad.str().rfind("violation at 1: ", 0) == 0);
    Owned unknown;
    CHECK(tm_behavior_conforms(doc.get(), "E1 E77", &ok, &unknown.p) == TM_E_UNKNOWN_EVENT);

    DocPtr pp = bundled("predator_prey");
    Owned capped;
    CHECK(tm_behavior_runs(pp.get(), 5, 3, &count, &capped.p) == TM_E_RUN_CAP);
}

TEST_CASE("rendering through the C API") {
    DocPtr doc = bundled("coin");
    for (tm_render_target t : {TM_RENDER_STATIC, TM_RENDER_EVENTS, TM_RENDER_BEHAVIOR}) {
        Owned dot;
        REQUIRE(tm_render(doc.get(), t, 1, 1, &dot.p) == TM_OK);
        CHECK(dot.str().rfind("digraph", 0) == 0);
    }
    Owned dot;
    CHECK(tm_render(doc.get(), static_cast<tm_render_target>(7), 1, 1, &dot.p) == TM_E_INVALID_ARGUMENT);
}

TEST_CASE("simulation batches are deterministic") {
    DocPtr doc = bundled("coin");
    BatchPtr a = simulate(doc.get(), 5, 20);
    BatchPtr b = simulate(doc.get(), 5, 20);
    CHECK(tm_batch_size(a.get()) == 20);
    Owned ta, tb;
    REQUIRE(tm_batch_trace_tsv(a.get(), &ta.p) == TM_OK);
    REQUIRE(tm_batch_trace_tsv(b.get(), &tb.p) == TM_OK);
    CHECK(ta.str() == tb.str());
    CHECK(ta.str().rfind("# tmkit-trace model=coin runs=20\n", 0) == 0);

    size_t nonconformant = 9;
    Owned verdicts;
    REQUIRE(tm_batch_verdicts(a.get(), &nonconformant, &verdicts.p) == TM_OK);
    CHECK(nonconformant == 0);

    Owned events;
    REQUIRE(tm_batch_events(a.get(), &events.p) == TM_OK);
    CHECK(events.str().rfind("5\tE1 E2 ", 0) == 0);

    Owned info, json;
    REQUIRE(tm_batch_info(a.get(), nullptr, 2.0, &info.p, &json.p) == TM_OK);
    CHECK(info.str().find("E3") != std::string::npos);
    CHECK(json.str().find("\"observations\": 20") != std::string::npos);

    Owned summary;
    REQUIRE(tm_batch_summary(a.get(), "E3,E4", &summary.p) == TM_OK);
    CHECK(summary.str().find("conformant\t20") != std::string::npos);

    Owned jsonl;
    REQUIRE(tm_batch_trace_jsonl(a.get(), &jsonl.p) == TM_OK);
    CHECK(jsonl.str().rfind("{\"run\":0,\"seed\":5,", 0) == 0);

    Owned none;
    CHECK(tm_batch_info(a.get(), "E7,E9,E4", 3.0, &none.p, nullptr) == TM_E_DOMAIN);
}

TEST_CASE("configuration values and rule replacement change the trajectory") {
    DocPtr doc = bundled("predator_prey");
    ConfigPtr cfg(tm_config_new(), tm_config_free);
    tm_config_set_max_ticks(cfg.get(), 3);
    REQUIRE(tm_config_set_value(cfg.get(), "H", 0) == TM_OK);
    REQUIRE(tm_config_set_value(cfg.get(), "L", 0) == TM_OK);
    tm_batch* raw = nullptr;
    REQUIRE(tm_simulate(doc.get(), cfg.get(), 1, 1, &raw) == TM_OK);
    BatchPtr b(raw, tm_batch_free);
    Owned ticks;
    REQUIRE(tm_batch_ticks_tsv(b.get(), 0, &ticks.p) == TM_OK);
    CHECK(ticks.str() == "tick\tH\tL\n0\t0\t0\n1\t0\t0\n2\t0\t0\n");
    Owned out_of_range;
    CHECK(tm_batch_ticks_tsv(b.get(), 1, &out_of_range.p) == TM_E_INVALID_ARGUMENT);

    REQUIRE(tm_document_replace_rules(doc.get(), "rule Population.process { H = H + 1; L = L; }") == TM_OK);
    ConfigPtr plain(tm_config_new(), tm_config_free);
    tm_config_set_max_ticks(plain.get(), 3);
    raw = nullptr;
    REQUIRE(tm_simulate(doc.get(), plain.get(), 1, 1, &raw) == TM_OK);
    BatchPtr c(raw, tm_batch_free);
    Owned t2;
    REQUIRE(tm_batch_ticks_tsv(c.get(), 0, &t2.p) == TM_OK);
    CHECK(t2.str() == "tick\tH\tL\n0\t20\t10\n1\t21\t10\n2\t22\t10\n");

    CHECK(tm_document_replace_rules(doc.get(), "thimac X;") == TM_E_INVALID_ARGUMENT);
    CHECK(tm_document_replace_rules(doc.get(), "rule Nope.process { H = 1; }") == TM_E_PARSE);
}

TEST_CASE("engine failures map to status codes") {
    DocPtr doc = parsed(R"(model m {
  thimac A { create; }
  var x = 1;
  var y = 0;
  rule A.create { x = x / y; }
  event E1 "divides" { A.create }
})");
    ConfigPtr cfg(tm_config_new(), tm_config_free);
    tm_batch* b = nullptr;
    CHECK(tm_simulate(doc.get(), cfg.get(), 1, 1, &b) == TM_E_DIVISION_BY_ZERO);
    CHECK(b == nullptr);
    CHECK(tm_config_set_value(cfg.get(), "zz", 1) == TM_OK);
    CHECK(tm_simulate(doc.get(), cfg.get(), 1, 1, &b) == TM_E_INVALID_ARGUMENT);
}

TEST_CASE("information measures") {
    double v = 0;
    REQUIRE(tm_self_information(0.5, 2.0, &v) == TM_OK);
    CHECK(v == 1.0);
    double fair[] = {0.5, 0.5};
    REQUIRE(tm_entropy(fair, 2, 2.0, &v) == TM_OK);
    CHECK(v == 1.0);
    double bad[] = {0.5, 0.6};
    CHECK(tm_entropy(bad, 2, 2.0, &v) == TM_E_DOMAIN);
    CHECK(tm_self_information(0.0, 2.0, &v) == TM_E_DOMAIN);
    const char* labels[] = {"face", "tail"};
    Owned text, json;
    REQUIRE(tm_info_report(labels, fair, 2, 2.0, &text.p, &json.p) == TM_OK);
    CHECK(text.str().find("entropy 1 bits") != std::string::npos);
    CHECK(json.str().find("\"entropy\": 1.0") != std::string::npos);
}
