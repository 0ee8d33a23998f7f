#pragma once

#include "tmkit/behavior.hpp"
#include "tmkit/events.hpp"
#include "tmkit/model.hpp"
#include "tmkit/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tmkit {

enum class FiringOrder : std::uint8_t { Declaration, IdSorted };

struct EngineConfig {
    std::uint64_t max_ticks = 1000;
    std::uint64_t seed = 0;
    FiringOrder firing_order = FiringOrder::Declaration;
    /// Divergence guard on things that have not yet settled.
    std::size_t max_in_flight = 100000;
    /// Initial values replacing the model's declared ones.
    std::map<std::string, double> overrides;
};

struct ThingInstance {
    std::uint64_t id = 0;
    std::string type_thimac;
    std::string at;
    std::map<std::string, double> payload;
    /// Arc that brought the thing to `at` (flow), or the trigger that created it.
    std::string via;
    /// At a transfer stage: true when the thing is entering its machine.
    bool inbound = false;
    bool settled = false;

    friend bool operator==(const ThingInstance&, const ThingInstance&) = default;
};

struct TraceEntry {
    std::uint64_t tick = 0;
    std::string stage;
    std::uint64_t thing = 0;
    std::optional<std::string> event;
    std::string via;
    /// State variables after the firing, in model declaration order.
    std::vector<double> variables;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TickSnapshot {
    std::uint64_t tick = 0;
    std::vector<double> variables;

    friend bool operator==(const TickSnapshot&, const TickSnapshot&) = default;
};

struct Trace {
    std::string model;
    std::uint64_t seed = 0;
    std::vector<std::string> variable_names;
    std::vector<TraceEntry> entries;
    std::vector<TickSnapshot> ticks;
    std::vector<std::string> warnings;

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct ArmedCreate {
    std::size_t stage = 0;
    std::string via;

    friend bool operator==(const ArmedCreate&, const ArmedCreate&) = default;
};

struct EngineState {
    std::uint64_t tick = 0;
    std::vector<ThingInstance> things;
    /// Current values for every model variable, declaration order.
    std::vector<double> variables;
    /// Create stages due to fire on the next tick.
    std::vector<ArmedCreate> armed;
    SplitMix64 rng;
    std::uint64_t next_thing = 1;

    std::size_t in_flight() const;
    bool quiescent() const;
    friend bool operator==(const EngineState&, const EngineState&) = default;
};

/// Validated, precompiled view of a model's rules and arcs used for stepping.
class Engine {
public:
    /// Throws InvalidRule when a rule does not compile against the model.
    Engine(const Model& model, EngineConfig config = {});

    const Model& model() const noexcept { return *model_; }
    const EngineConfig& config() const noexcept { return config_; }

    /// Tick 0 state: declared variable values (after overrides), every Create stage without
    /// an inbound trigger armed, generator seeded from the config.
    EngineState initial_state() const;

    /// Fires every enabled stage once. A quiescent state is returned unchanged.
    /// Throws Divergence or DivisionByZero.
    std::vector<TraceEntry> step(EngineState& state) const;

    /// Create stages without inbound triggers.
    const std::vector<std::size_t>& root_creates() const noexcept { return roots_; }
    std::vector<std::string> state_variable_names() const;
    std::vector<double> state_variables(const EngineState& state) const;

private:
    struct CompiledRule {
        UpdateRule::Kind kind = UpdateRule::Kind::Deterministic;
        std::vector<std::pair<std::size_t, Expr>> assignments;
        std::vector<std::pair<Expr, std::size_t>> outcomes;
        std::vector<std::string> outcome_labels;
    };

    struct StageInfo {
        std::size_t owner = 0;
        std::vector<std::size_t> flows_out;
        std::vector<std::size_t> triggers_out;
        std::optional<CompiledRule> rule;
    };

    const Model* model_;
    EngineConfig config_;
    std::vector<StageInfo> stages_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> roots_;
    std::vector<std::size_t> state_vars_;
    std::map<std::string, std::size_t, std::less<>> stage_pos_;
    std::map<std::string, std::size_t, std::less<>> thimac_pos_;
};

/// One tick on a fresh engine. Convenience for callers that step a single state.
std::vector<TraceEntry> step(const Model& model, EngineState& state, const EngineConfig& config = {});

/// Runs until quiescence or max_ticks; recurrences in `graph` re-arm the root creates of
/// the events they span. Entry events are resolved against `catalog`.
Trace run(const Model& model, const EventCatalog& catalog, const BehaviorGraph& graph,
          const EngineConfig& config);

/// Independent runs with seeds config.seed, config.seed + 1, ..., ordered by seed.
std::vector<Trace> run_batch(const Model& model, const EventCatalog& catalog,
                             const BehaviorGraph& graph, const EngineConfig& config,
                             std::size_t runs, unsigned threads = 1);

struct TraceEvents {
    std::vector<std::string> sequence;
    Verdict verdict;
};

/// Consecutive-deduplicated event ids in firing order plus the conformance verdict.
TraceEvents trace_events(const Trace& trace, const BehaviorGraph& graph);

}  // namespace tmkit
