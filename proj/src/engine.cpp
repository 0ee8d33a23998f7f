#include "tmkit/engine.hpp"

#include "tmkit/error.hpp"
#include "tmkit/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

namespace tmkit {

std::size_t EngineState::in_flight() const {
    return static_cast<std::size_t>(
        std::count_if(things.begin(), things.end(), [](const ThingInstance& t) { return !t.settled; }));
}

bool EngineState::quiescent() const { return armed.empty() && in_flight() == 0; }

namespace {

std::size_t variable_index(const Model& model, std::string_view name) {
    for (std::size_t i = 0; i < model.variables.size(); ++i)
        if (model.variables[i].name == name) return i;
    return model.variables.size();
}

void check_expr(const Model& model, const Expr& e, const std::string& where) {
    for (const std::string& v : e.variables())
        if (variable_index(model, v) == model.variables.size())
            throw Error(ErrorCode::InvalidRule, "rule on " + where + " reads undeclared '" + v + "'");
}

}  // namespace

Engine::Engine(const Model& model, EngineConfig config) : model_(&model), config_(std::move(config)) {
    for (std::size_t i = 0; i < model.thimacs.size(); ++i) thimac_pos_.try_emplace(model.thimacs[i].id, i);
    for (std::size_t i = 0; i < model.stages.size(); ++i) stage_pos_.try_emplace(model.stages[i].id, i);

    auto stage_at = [&](const std::string& id, const std::string& what) {
        auto it = stage_pos_.find(id);
        if (it == stage_pos_.end())
            throw Error(ErrorCode::InvalidArgument, what + " refers to unknown stage '" + id + "'");
        return it->second;
    };

    stages_.resize(model.stages.size());
    for (std::size_t i = 0; i < model.stages.size(); ++i) {
        auto it = thimac_pos_.find(model.stages[i].owner);
        if (it == thimac_pos_.end())
            throw Error(ErrorCode::InvalidArgument, "stage '" + model.stages[i].id + "' has no owner");
        stages_[i].owner = it->second;
    }
    for (std::size_t f = 0; f < model.flows.size(); ++f) {
        stages_[stage_at(model.flows[f].from, "flow " + model.flows[f].id)].flows_out.push_back(f);
        stage_at(model.flows[f].to, "flow " + model.flows[f].id);
    }
    std::vector<bool> triggered(model.stages.size(), false);
    for (std::size_t t = 0; t < model.triggers.size(); ++t) {
        stages_[stage_at(model.triggers[t].from, "trigger " + model.triggers[t].id)].triggers_out.push_back(t);
        triggered[stage_at(model.triggers[t].to, "trigger " + model.triggers[t].id)] = true;
    }

    order_.resize(model.stages.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (config_.firing_order == FiringOrder::IdSorted)
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return model.stages[a].id < model.stages[b].id; });

    for (std::size_t i = 0; i < model.stages.size(); ++i)
        if (model.stages[i].kind == StageKind::Create && !triggered[i]) roots_.push_back(i);

    for (std::size_t v = 0; v < model.variables.size(); ++v)
        if (model.variables[v].role == VariableRole::State) state_vars_.push_back(v);

    for (const auto& [name, value] : config_.overrides) {
        (void)value;
        if (variable_index(model, name) == model.variables.size())
            throw Error(ErrorCode::InvalidArgument, "override of undeclared variable '" + name + "'");
    }

    for (const UpdateRule& rule : model.rules) {
        auto it = stage_pos_.find(rule.stage);
        if (it == stage_pos_.end())
            throw Error(ErrorCode::InvalidRule, "rule on unknown stage '" + rule.stage + "'");
        const std::size_t s = it->second;
        const StageKind kind = model.stages[s].kind;
        if (kind != StageKind::Create && kind != StageKind::Process)
            throw Error(ErrorCode::InvalidRule, "rule on " + rule.stage + " which is not create or process");
        if (stages_[s].rule) throw Error(ErrorCode::InvalidRule, "second rule on " + rule.stage);

        CompiledRule compiled;
        compiled.kind = rule.kind;
        if (rule.kind == UpdateRule::Kind::Deterministic) {
            if (rule.assignments.empty()) throw Error(ErrorCode::InvalidRule, "empty rule on " + rule.stage);
            for (const Assignment& a : rule.assignments) {
                const std::size_t v = variable_index(model, a.target);
                if (v == model.variables.size())
                    throw Error(ErrorCode::InvalidRule, "rule on " + rule.stage + " assigns undeclared '" + a.target + "'");
                if (model.variables[v].role == VariableRole::Constant)
                    throw Error(ErrorCode::InvalidRule, "rule on " + rule.stage + " assigns constant '" + a.target + "'");
                check_expr(model, a.value, rule.stage);
                compiled.assignments.emplace_back(v, a.value);
            }
        } else {
            if (rule.outcomes.empty()) throw Error(ErrorCode::InvalidRule, "empty rule on " + rule.stage);
            for (const Outcome& o : rule.outcomes) {
                check_expr(model, o.probability, rule.stage);
                const auto& out = stages_[s].triggers_out;
                auto t = std::find_if(out.begin(), out.end(),
                                      [&](std::size_t k) { return model.triggers[k].id == o.trigger; });
                if (t == out.end())
                    throw Error(ErrorCode::InvalidRule,
                                "outcome '" + o.label + "' names '" + o.trigger + "' which is not a trigger leaving " + rule.stage);
                compiled.outcomes.emplace_back(o.probability, *t);
                compiled.outcome_labels.push_back(o.label);
            }
        }
        stages_[s].rule = std::move(compiled);
    }
}

EngineState Engine::initial_state() const {
    EngineState state;
    state.rng = SplitMix64(config_.seed);
    state.variables.reserve(model_->variables.size());
    for (const Variable& v : model_->variables) {
        auto it = config_.overrides.find(v.name);
        state.variables.push_back(it == config_.overrides.end() ? v.value : it->second);
    }
    for (std::size_t s : roots_) state.armed.push_back({s, {}});
    return state;
}

std::vector<std::string> Engine::state_variable_names() const {
    std::vector<std::string> out;
    for (std::size_t v : state_vars_) out.push_back(model_->variables[v].name);
    return out;
}

std::vector<double> Engine::state_variables(const EngineState& state) const {
    std::vector<double> out;
    out.reserve(state_vars_.size());
    for (std::size_t v : state_vars_) out.push_back(state.variables[v]);
    return out;
}

std::vector<TraceEntry> Engine::step(EngineState& state) const {
    if (state.quiescent()) return {};
    const Model& m = *model_;
    const std::size_t n = m.stages.size();

    const std::vector<double> before = state.variables;
    auto lookup = [&](const std::string& name) { return before[variable_index(m, name)]; };

    std::vector<std::vector<std::size_t>> resident(n);
    for (std::size_t i = 0; i < state.things.size(); ++i) {
        const ThingInstance& t = state.things[i];
        if (t.settled) continue;
        auto it = stage_pos_.find(t.at);
        if (it != stage_pos_.end()) resident[it->second].push_back(i);
    }

    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order_[k]] = k;

    std::vector<std::optional<std::string>> now(n);
    for (const ArmedCreate& a : state.armed)
        if (a.stage < n && !now[a.stage]) now[a.stage] = a.via;
    std::vector<ArmedCreate> next_armed;

    auto arm = [&](std::size_t from, std::size_t trigger) {
        const std::size_t target = stage_pos_.find(m.triggers[trigger].to)->second;
        const std::string& via = m.triggers[trigger].id;
        if (rank[target] > rank[from]) {
            if (!now[target]) now[target] = via;
        } else if (std::none_of(next_armed.begin(), next_armed.end(),
                                [&](const ArmedCreate& a) { return a.stage == target; })) {
            next_armed.push_back({target, via});
        }
    };

    auto guard_matches = [&](const Trigger& t, const std::string& type) {
        if (!t.guard) return true;
        // A guard names the thing's thimac or one of its ancestors.
        std::set<std::string> seen;
        for (std::string cur = type; !cur.empty() && seen.insert(cur).second;) {
            if (cur == *t.guard) return true;
            auto it = thimac_pos_.find(cur);
            if (it == thimac_pos_.end() || !m.thimacs[it->second].parent) break;
            cur = *m.thimacs[it->second].parent;
        }
        return false;
    };

    auto dispatch = [&](ThingInstance& thing, std::size_t s) {
        const bool transfer = m.stages[s].kind == StageKind::Transfer;
        std::vector<std::size_t> candidates;
        for (std::size_t f : stages_[s].flows_out) {
            const std::size_t to = stage_pos_.find(m.flows[f].to)->second;
            const bool cross = stages_[to].owner != stages_[s].owner;
            if (transfer && cross == thing.inbound) continue;
            candidates.push_back(f);
        }
        if (candidates.size() != 1) {
            thing.settled = true;
            return;
        }
        const Flow& f = m.flows[candidates.front()];
        const std::size_t to = stage_pos_.find(f.to)->second;
        thing.inbound = m.stages[to].kind == StageKind::Transfer && stages_[to].owner != stages_[s].owner;
        thing.at = f.to;
        thing.via = f.id;
    };

    std::vector<TraceEntry> entries;
    const std::uint64_t tick = state.tick;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t s = order_[k];
        const StageInfo& info = stages_[s];
        const bool create = m.stages[s].kind == StageKind::Create && now[s].has_value();
        if (!create && resident[s].empty()) continue;

        std::optional<std::size_t> chosen;
        if (info.rule) {
            const CompiledRule& rule = *info.rule;
            if (rule.kind == UpdateRule::Kind::Deterministic) {
                for (const auto& [v, e] : rule.assignments) state.variables[v] = e.evaluate(lookup);
            } else {
                std::vector<double> probs;
                double total = 0.0;
                for (const auto& [e, t] : rule.outcomes) {
                    probs.push_back(e.evaluate(lookup));
                    if (!(probs.back() >= 0.0))
                        throw Error(ErrorCode::Domain, "negative outcome probability on " + m.stages[s].id);
                    total += probs.back();
                }
                if (std::fabs(total - 1.0) > 1e-12)
                    throw Error(ErrorCode::Domain, "outcome probabilities on " + m.stages[s].id + " do not sum to 1");
                const double u = state.rng.next_unit();
                double acc = 0.0;
                chosen = rule.outcomes.size() - 1;
                for (std::size_t i = 0; i < probs.size(); ++i) {
                    acc += probs[i];
                    if (u < acc) {
                        chosen = i;
                        break;
                    }
                }
            }
        }

        auto fire_triggers = [&](const std::string& type) {
            for (std::size_t t : info.triggers_out) {
                if (info.rule && info.rule->kind == UpdateRule::Kind::Stochastic) {
                    const auto& outs = info.rule->outcomes;
                    const bool named = std::any_of(outs.begin(), outs.end(), [&](const auto& o) { return o.second == t; });
                    if (named && (!chosen || outs[*chosen].second != t)) continue;
                }
                if (guard_matches(m.triggers[t], type)) arm(s, t);
            }
        };

        const std::vector<double> after = state_variables(state);
        if (create) {
            ThingInstance thing;
            thing.id = state.next_thing++;
            thing.type_thimac = m.stages[s].owner;
            thing.at = m.stages[s].id;
            thing.via = *now[s];
            entries.push_back({tick, m.stages[s].id, thing.id, std::nullopt, thing.via, after});
            fire_triggers(thing.type_thimac);
            dispatch(thing, s);
            state.things.push_back(std::move(thing));
        }
        for (std::size_t i : resident[s]) {
            ThingInstance& thing = state.things[i];
            entries.push_back({tick, m.stages[s].id, thing.id, std::nullopt, thing.via, after});
            fire_triggers(thing.type_thimac);
            dispatch(thing, s);
        }
    }

    state.armed = std::move(next_armed);
    ++state.tick;
    if (state.in_flight() > config_.max_in_flight)
        throw Error(ErrorCode::Divergence,
                    "more than " + std::to_string(config_.max_in_flight) + " things in flight at tick " +
                        std::to_string(tick));
    return entries;
}

std::vector<TraceEntry> step(const Model& model, EngineState& state, const EngineConfig& config) {
    return Engine(model, config).step(state);
}

Trace run(const Model& model, const EventCatalog& catalog, const BehaviorGraph& graph,
          const EngineConfig& config) {
    const Engine engine(model, config);
    Trace trace;
    trace.model = model.name;
    trace.seed = config.seed;
    trace.variable_names = engine.state_variable_names();

    // Root creates lying in the span of each recurrence.
    std::vector<std::vector<std::size_t>> rearm;
    for (const EventEdge& edge : graph.spec().recurrences) {
        std::vector<std::size_t> stages;
        for (const std::string& id : graph.recurrence_span(edge)) {
            const Event* e = catalog.find(id);
            for (std::size_t s : engine.root_creates())
                if (e->region.contains(model.stages[s].id) &&
                    std::find(stages.begin(), stages.end(), s) == stages.end())
                    stages.push_back(s);
        }
        rearm.push_back(std::move(stages));
    }

    EngineState state = engine.initial_state();
    bool terminal_seen = false;
    bool hit_limit = true;
    while (state.tick < config.max_ticks) {
        if (state.quiescent()) {
            hit_limit = false;
            break;
        }
        std::vector<TraceEntry> entries = engine.step(state);
        std::set<std::string> fired;
        for (TraceEntry& e : entries) {
            e.event = resolve_event(catalog, e.stage, e.via);
            if (e.event) {
                fired.insert(*e.event);
                if (graph.is_terminal(*e.event)) terminal_seen = true;
            }
            trace.entries.push_back(std::move(e));
        }
        trace.ticks.push_back({state.tick - 1, engine.state_variables(state)});
        const auto& recurrences = graph.spec().recurrences;
        for (std::size_t r = 0; r < recurrences.size(); ++r) {
            if (!fired.count(recurrences[r].first)) continue;
            for (std::size_t s : rearm[r])
                if (std::none_of(state.armed.begin(), state.armed.end(),
                                 [&](const ArmedCreate& a) { return a.stage == s; }))
                    state.armed.push_back({s, {}});
        }
    }
    if (hit_limit && state.quiescent()) hit_limit = false;
    if (!terminal_seen) {
        if (hit_limit)
            trace.warnings.push_back("max_ticks " + std::to_string(config.max_ticks) +
                                     " reached before a terminal event");
        else
            trace.warnings.push_back("run stopped at tick " + std::to_string(state.tick) +
                                     " before a terminal event");
    }
    return trace;
}

std::vector<Trace> run_batch(const Model& model, const EventCatalog& catalog, const BehaviorGraph& graph,
                             const EngineConfig& config, std::size_t runs, unsigned threads) {
    std::vector<Trace> out(runs);
    auto one = [&](std::size_t i) {
        EngineConfig c = config;
        c.seed = config.seed + i;
        out[i] = run(model, catalog, graph, c);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(runs, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < runs; ++i) one(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < runs; i += threads) one(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

TraceEvents trace_events(const Trace& trace, const BehaviorGraph& graph) {
    TraceEvents out;
    for (const TraceEntry& e : trace.entries)
        if (e.event && (out.sequence.empty() || out.sequence.back() != *e.event))
            out.sequence.push_back(*e.event);
    out.verdict = conforms(out.sequence, graph);
    return out;
}

}  // namespace tmkit
