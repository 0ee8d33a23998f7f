#include "doctest.h"

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/validate.hpp"

using namespace tmkit;

namespace {

// Closure and flow legality checked directly on the model, without the validator.
bool closure_holds(const Model& m) {
    for (const Stage& s : m.stages)
        if (!is_valid(s.kind)) return false;
    return true;
}

bool cross_flows_join_transfers(const Model& m) {
    ModelIndex index(m);
    for (const Flow& f : m.flows) {
        const Stage* a = index.stage(f.from);
        const Stage* b = index.stage(f.to);
        if (!a || !b) return false;
        if (a->owner != b->owner && (a->kind != StageKind::Transfer || b->kind != StageKind::Transfer)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("generated models are accepted and satisfy closure and flow legality") {
    std::size_t accepted = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        tmtest::Gen g(seed);
        Model m = tmtest::random_valid_model(g);
        ValidationReport r = validate_static(m);
        CAPTURE(seed);
        CAPTURE(r.to_text());
        CHECK(r.ok());
        if (!r.ok()) continue;
        ++accepted;
        CHECK(closure_holds(m));
        CHECK(cross_flows_join_transfers(m));
    }
    CHECK(accepted == 1000);
}

TEST_CASE("every mutation is rejected with the matching rule") {
    std::map<Rule, std::size_t> applied;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        for (Rule rule : tmtest::all_rules()) {
            tmtest::Gen g(seed * 31 + static_cast<std::uint64_t>(rule));
            Model m = tmtest::random_valid_model(g);
            if (!tmtest::break_rule(m, rule, g)) continue;
            ++applied[rule];
            ValidationReport r = validate_static(m);
            CAPTURE(seed);
            CAPTURE(rule_code(rule));
            CAPTURE(r.to_text());
            CHECK(r.has(rule));
        }
    }
    for (Rule rule : tmtest::all_rules()) {
        CAPTURE(rule_code(rule));
        CHECK(applied[rule] > 50);
    }
}

TEST_CASE("generated documents round-trip through the serializer") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        tmtest::Gen g(seed + 5000);
        Document d = tmtest::random_document(g);
        std::string text = serialize(d);
        ParseResult r = parse({text, "gen"});
        CAPTURE(seed);
        CAPTURE(text);
        REQUIRE(r.ok());
        CHECK(*r.document == d);
    }
}

TEST_CASE("validation is independent of the accepted model's stage order") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        tmtest::Gen g(seed + 9000);
        Model m = tmtest::random_valid_model(g);
        std::shuffle(m.stages.begin(), m.stages.end(), g.engine());
        std::shuffle(m.flows.begin(), m.flows.end(), g.engine());
        CHECK(validate_static(m).ok());
    }
}
