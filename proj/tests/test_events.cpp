#include "doctest.h"

#include "support/fixtures.hpp"
#include "tmkit/error.hpp"
#include "tmkit/events.hpp"

#include <algorithm>

using namespace tmkit;

namespace {

std::vector<std::string> ids_of(const EventCatalog& c) {
    std::vector<std::string> out;
    for (const Event& e : c.events()) out.push_back(e.id);
    return out;
}

std::vector<std::string> numbered(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back("E" + std::to_string(i));
    return out;
}

// Every region element exists in the model and every arc brings its endpoints along.
bool region_is_subdiagram(const Model& m, const Region& r) {
    ModelIndex index(m);
    for (const std::string& id : r.elements) {
        auto ref = index.element(id);
        if (!ref) return false;
        if (ref->type == ElementType::Flow) {
            const Flow& f = m.flows[ref->index];
            if (!r.contains(f.from) || !r.contains(f.to)) return false;
        }
        if (ref->type == ElementType::Trigger) {
            const Trigger& t = m.triggers[ref->index];
            if (!r.contains(t.from) || !r.contains(t.to)) return false;
        }
    }
    return true;
}

Model line() {
    return tmtest::parse_text(R"(model m {
  thimac A { create; release; transfer; }
  thimac B { transfer; receive; }
  flow A.create -> A.release;
  flow A.release -> A.transfer;
  flow A.transfer -> B.transfer;
  flow B.transfer -> B.receive;
})")
        .model;
}

}  // namespace

TEST_CASE("tile catalog holds E1 to E10") {
    Workspace ws = tmtest::load_workspace("tile");
    CHECK(ids_of(*ws.catalog) == numbered(10));
    const EventCatalog& c = *ws.catalog;
    CHECK(c.find("E1")->region.elements == std::vector<std::string>{"Tile.create"});
    CHECK(c.find("E4")->region.contains("Location.transfer"));
    CHECK(c.find("E5")->region.contains("Data.create"));
    CHECK(c.find("E7")->region.contains("Data.transfer->Man.transfer"));
    CHECK(c.find("E8")->region.contains("Man.process"));
    CHECK(c.find("E9")->region.contains("Position.create"));
    CHECK(c.find("E10")->region.contains("Injury.create"));
    for (const char* id : {"E1", "E2", "E3", "E4", "E6", "E9", "E10"}) CHECK(c.find(id)->data_emitting);
    for (const char* id : {"E5", "E7", "E8"}) CHECK_FALSE(c.find(id)->data_emitting);
}

TEST_CASE("coin catalog holds E1 to E14") {
    Workspace ws = tmtest::load_workspace("coin");
    CHECK(ids_of(*ws.catalog) == numbered(14));
    const EventCatalog& c = *ws.catalog;
    CHECK(c.find("E1")->region.elements == std::vector<std::string>{"Coin.create"});
    CHECK(c.find("E2")->region.contains("World.process"));
    CHECK(c.find("E3")->region.contains("Face.create"));
    CHECK(c.find("E4")->region.contains("Tail.create"));
    CHECK(c.find("E5")->region.contains("Transmitter.transfer"));
    CHECK(c.find("E6")->region.contains("Transmitter.process"));
    CHECK(c.find("E7")->region.contains("FaceInfo.create"));
    CHECK(c.find("E9")->region.contains("TailInfo.create"));
    CHECK(c.find("E11")->region.contains("FaceCode.create"));
    CHECK(c.find("E12")->region.contains("TailCode.create"));
    CHECK(c.find("E14")->region.contains("Destination.process"));
    CHECK(c.find("E3")->data_emitting);
    CHECK(c.find("E4")->data_emitting);
}

TEST_CASE("bundled catalogs cover every element with subdiagram regions") {
    for (const char* name : {"predator_prey", "tile", "coin"}) {
        CAPTURE(name);
        Workspace ws = tmtest::load_workspace(name);
        Coverage cov = coverage_check(*ws.catalog);
        CHECK(cov.uncovered.empty());
        CHECK(cov.covered.size() == ModelIndex(*ws.model).element_count());
        for (const Event& e : ws.catalog->events()) {
            CAPTURE(e.id);
            CHECK(e.region.connected);
            CHECK(region_is_subdiagram(*ws.model, e.region));
        }
    }
}

TEST_CASE("define_event rejects disconnected, unknown, empty and repeated definitions") {
    Model m = line();
    auto expect_code = [&](ErrorCode code, auto&& fn) {
        try {
            fn();
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == code);
        }
    };
    expect_code(ErrorCode::DisconnectedRegion, [&] { define_event(m, {"A.create", "B.receive"}, "E1", "x"); });
    expect_code(ErrorCode::UnknownElement, [&] { define_event(m, {"C.create"}, "E1", "x"); });
    expect_code(ErrorCode::InvalidArgument, [&] { define_event(m, {}, "E1", "x"); });
    Event ok = define_event(m, {"A.create", "B.receive"}, "E1", "x", {true, false, ""});
    CHECK_FALSE(ok.region.connected);

    EventCatalog cat(std::make_shared<const Model>(m));
    define_event(cat, {"A.create"}, "E1", "first");
    expect_code(ErrorCode::DuplicateEvent, [&] { define_event(cat, {"A.release"}, "E1", "again"); });
    CHECK(cat.size() == 1);
}

TEST_CASE("coverage lists uncovered elements and pairwise overlaps") {
    auto m = std::make_shared<const Model>(line());
    EventCatalog cat(m);
    define_event(cat, {"A.create->A.release"}, "E1", "a");
    define_event(cat, {"A.release->A.transfer"}, "E2", "b");
    Coverage cov = coverage_check(cat);
    CHECK(cov.uncovered ==
          std::vector<std::string>{"B.transfer", "B.receive", "A.transfer->B.transfer", "B.transfer->B.receive"});
    REQUIRE(cov.overlaps.size() == 1);
    CHECK(cov.overlaps[0].shared == std::vector<std::string>{"A.release"});
    CHECK(cov.to_text().find("uncovered 4\n") != std::string::npos);
}

TEST_CASE("states fall back to descriptions") {
    Workspace ws = tmtest::load_workspace("tile");
    auto states = states_of(*ws.catalog);
    REQUIRE(states.size() == 10);
    CHECK(states[0].text == "tile resting in place");
    CHECK(states[1].text == ws.catalog->find("E2")->description);
}

TEST_CASE("firings resolve to the tightest event holding the arc") {
    Workspace ws = tmtest::load_workspace("predator_prey");
    CHECK(resolve_event(*ws.catalog, "Hare.create", "Food.create=>Hare.create") == "E1");
    CHECK(resolve_event(*ws.catalog, "Population.create", "Kill.create=>Population.create") == "E4");
    CHECK(resolve_event(*ws.catalog, "Lynx.process", "Lynx.create->Lynx.process") == "E3");
    CHECK(resolve_event(*ws.catalog, "HareMortality.create") == "E2");
    CHECK_FALSE(resolve_event(*ws.catalog, "LynxGrowth.process").has_value());
}
