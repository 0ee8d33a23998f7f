#include "tmkit/behavior.hpp"

#include "tmkit/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace tmkit {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::size_t index_in(const std::vector<std::string>& ids, std::string_view id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    return it == ids.end() ? npos : static_cast<std::size_t>(it - ids.begin());
}

void require_event(const EventCatalog& catalog, const std::string& id) {
    if (!catalog.find(id)) throw Error(ErrorCode::UnknownEvent, "unknown event '" + id + "'");
}

bool has_cycle(const std::vector<std::vector<std::size_t>>& next) {
    std::vector<int> color(next.size(), 0);
    auto visit = [&](auto&& self, std::size_t v) -> bool {
        color[v] = 1;
        for (std::size_t w : next[v]) {
            if (color[w] == 1) return true;
            if (color[w] == 0 && self(self, w)) return true;
        }
        color[v] = 2;
        return false;
    };
    for (std::size_t v = 0; v < next.size(); ++v)
        if (color[v] == 0 && visit(visit, v)) return true;
    return false;
}

}  // namespace

struct BehaviorAccess {
    using Used = std::vector<bool>;

    static bool blocked(const BehaviorGraph& g, std::size_t node, const Used& used) {
        for (std::size_t grp : g.groups_of_[node])
            if (used[grp]) return true;
        return false;
    }

    static Used mark(const BehaviorGraph& g, std::size_t node, Used used) {
        for (std::size_t grp : g.groups_of_[node]) used[grp] = true;
        return used;
    }

    static Used fresh(const BehaviorGraph& g, std::size_t node) {
        return mark(g, node, Used(g.group_count_, false));
    }

    static const std::vector<std::vector<std::size_t>>& next(const BehaviorGraph& g) { return g.next_; }
    static const std::vector<std::vector<std::size_t>>& recur(const BehaviorGraph& g) { return g.recur_; }
    static std::size_t node(const BehaviorGraph& g, std::string_view id) { return index_in(g.events_, id); }
};

namespace {

using State = std::pair<std::size_t, std::vector<bool>>;

std::vector<State> transitions(const BehaviorGraph& g, const State& s) {
    std::vector<State> out;
    for (std::size_t w : BehaviorAccess::next(g)[s.first])
        if (!BehaviorAccess::blocked(g, w, s.second)) out.push_back({w, BehaviorAccess::mark(g, w, s.second)});
    for (std::size_t w : BehaviorAccess::recur(g)[s.first]) out.push_back({w, BehaviorAccess::fresh(g, w)});
    return out;
}

// A state is live when some terminal event is still reachable from it.
bool live(const BehaviorGraph& g, const State& start, std::map<State, bool>& memo) {
    if (auto it = memo.find(start); it != memo.end()) return it->second;
    std::set<State> seen{start};
    std::deque<State> queue{start};
    bool found = false;
    while (!queue.empty() && !found) {
        State s = std::move(queue.front());
        queue.pop_front();
        if (g.is_terminal(g.events()[s.first])) {
            found = true;
            break;
        }
        for (State& t : transitions(g, s))
            if (seen.insert(t).second) queue.push_back(std::move(t));
    }
    memo[start] = found;
    return found;
}

}  // namespace

bool BehaviorGraph::participates(std::string_view id) const { return index_in(events_, id) != npos; }

bool BehaviorGraph::is_terminal(std::string_view id) const { return index_in(terminal_, id) != npos; }

bool BehaviorGraph::has_recurrence_from(std::string_view id) const {
    const std::size_t i = index_in(events_, id);
    return i != npos && !recur_[i].empty();
}

std::vector<std::string> BehaviorGraph::successors(std::string_view id) const {
    std::vector<std::string> out;
    const std::size_t i = index_in(events_, id);
    if (i == npos) return out;
    for (std::size_t w : next_[i]) out.push_back(events_[w]);
    return out;
}

std::vector<std::string> BehaviorGraph::recurrence_span(const EventEdge& recurrence) const {
    const std::size_t src = index_in(events_, recurrence.first);
    const std::size_t dst = index_in(events_, recurrence.second);
    if (src == npos || dst == npos) throw Error(ErrorCode::UnknownEvent, "recurrence not in graph");
    const std::size_t n = events_.size();
    std::vector<bool> from_dst(n, false), to_src(n, false);
    std::vector<std::size_t> stack{dst};
    from_dst[dst] = true;
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : next_[v])
            if (!from_dst[w]) from_dst[w] = true, stack.push_back(w);
    }
    std::vector<std::vector<std::size_t>> prev(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w : next_[v]) prev[w].push_back(v);
    stack = {src};
    to_src[src] = true;
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : prev[v])
            if (!to_src[w]) to_src[w] = true, stack.push_back(w);
    }
    std::vector<std::string> out;
    for (std::size_t v = 0; v < n; ++v)
        if (from_dst[v] && to_src[v]) out.push_back(events_[v]);
    return out;
}

BehaviorGraph build_behavior(std::shared_ptr<const EventCatalog> catalog, BehaviorSpec spec) {
    if (!catalog) throw Error(ErrorCode::InvalidArgument, "behavior needs an event catalog");
    const EventCatalog& cat = *catalog;

    std::set<std::string> named;
    for (const auto& [a, b] : spec.successions) {
        require_event(cat, a);
        require_event(cat, b);
        named.insert(a);
        named.insert(b);
    }
    for (const auto& [a, b] : spec.recurrences) {
        require_event(cat, a);
        require_event(cat, b);
        named.insert(a);
        named.insert(b);
    }
    for (const auto& group : spec.exclusive_groups) {
        std::set<std::string> members;
        for (const std::string& id : group) {
            require_event(cat, id);
            if (!members.insert(id).second)
                throw Error(ErrorCode::InvalidArgument, "exclusive group repeats '" + id + "'");
            named.insert(id);
        }
    }
    for (const Containment& c : spec.containments) {
        require_event(cat, c.container);
        const Region& outer = cat.find(c.container)->region;
        for (const std::string& id : c.contained) {
            require_event(cat, id);
            for (const std::string& element : cat.find(id)->region.elements)
                if (!outer.contains(element))
                    throw Error(ErrorCode::ContainmentViolation,
                                "event '" + c.container + "' does not contain '" + element + "' of '" + id + "'");
        }
    }

    BehaviorGraph g;
    for (const Event& e : cat.events())
        if (named.empty() || named.count(e.id)) g.events_.push_back(e.id);
    if (g.events_.empty()) throw Error(ErrorCode::EmptyGraph, "behavior graph has no events");

    const std::size_t n = g.events_.size();
    auto pos = [&](const std::string& id) { return index_in(g.events_, id); };
    g.next_.assign(n, {});
    g.recur_.assign(n, {});
    g.groups_of_.assign(n, {});
    std::vector<bool> has_in(n, false);
    for (const auto& [a, b] : spec.successions) {
        auto& out = g.next_[pos(a)];
        if (std::find(out.begin(), out.end(), pos(b)) == out.end()) out.push_back(pos(b));
        has_in[pos(b)] = true;
    }
    for (const auto& [a, b] : spec.recurrences) {
        auto& out = g.recur_[pos(a)];
        if (std::find(out.begin(), out.end(), pos(b)) == out.end()) out.push_back(pos(b));
    }
    for (auto& out : g.next_) std::sort(out.begin(), out.end());
    for (auto& out : g.recur_) std::sort(out.begin(), out.end());
    if (has_cycle(g.next_)) throw Error(ErrorCode::InvalidArgument, "successions form a cycle");

    g.group_count_ = spec.exclusive_groups.size();
    for (std::size_t k = 0; k < spec.exclusive_groups.size(); ++k)
        for (const std::string& id : spec.exclusive_groups[k]) g.groups_of_[pos(id)].push_back(k);

    for (std::size_t v = 0; v < n; ++v) {
        if (!has_in[v]) g.initial_.push_back(g.events_[v]);
        if (g.next_[v].empty()) g.terminal_.push_back(g.events_[v]);
    }
    g.catalog_ = std::move(catalog);
    g.spec_ = std::move(spec);
    return g;
}

std::vector<Run> enumerate_runs(const BehaviorGraph& graph, const EnumerateOptions& options) {
    const auto& events = graph.events();
    std::map<EventEdge, std::size_t> unrolled;
    std::vector<std::vector<std::size_t>> found;
    std::vector<std::size_t> path;

    auto emit = [&] {
        found.push_back(path);
        if (found.size() > options.max_runs)
            throw Error(ErrorCode::RunCapExceeded,
                        "more than " + std::to_string(options.max_runs) + " runs");
    };

    auto visit = [&](auto&& self, std::size_t v, const BehaviorAccess::Used& used) -> void {
        path.push_back(v);
        if (graph.is_terminal(events[v])) emit();
        // Successors and recurrence targets interleaved by catalog position.
        std::vector<std::pair<std::size_t, bool>> moves;
        for (std::size_t w : BehaviorAccess::next(graph)[v]) moves.push_back({w, false});
        for (std::size_t w : BehaviorAccess::recur(graph)[v]) moves.push_back({w, true});
        std::sort(moves.begin(), moves.end());
        for (const auto& [w, is_recur] : moves) {
            if (is_recur) {
                const EventEdge edge{events[v], events[w]};
                if (unrolled[edge] >= options.max_recurrence) continue;
                ++unrolled[edge];
                self(self, w, BehaviorAccess::fresh(graph, w));
                --unrolled[edge];
            } else if (!BehaviorAccess::blocked(graph, w, used)) {
                self(self, w, BehaviorAccess::mark(graph, w, used));
            }
        }
        path.pop_back();
    };

    for (const std::string& id : graph.initial()) {
        const std::size_t v = BehaviorAccess::node(graph, id);
        visit(visit, v, BehaviorAccess::fresh(graph, v));
    }

    // Positions in events() follow catalog order, so index order is catalog order.
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    std::vector<Run> runs;
    runs.reserve(found.size());
    for (const auto& p : found) {
        Run r;
        for (std::size_t v : p) r.push_back(events[v]);
        runs.push_back(std::move(r));
    }
    return runs;
}

std::string Verdict::to_text() const {
    if (conformant) return "conformant\n";
    return "violation at " + std::to_string(index) + ": " + reason + "\n";
}

Verdict conforms(const std::vector<std::string>& trace, const BehaviorGraph& graph) {
    const EventCatalog& catalog = graph.catalog();
    for (const std::string& id : trace) require_event(catalog, id);

    std::map<State, bool> memo;
    std::set<State> current;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const std::string& id = trace[i];
        const std::size_t w = BehaviorAccess::node(graph, id);
        if (w == npos) return {false, i, "event " + id + " takes no part in the behavior"};

        std::set<State> next;
        if (i == 0) {
            if (std::find(graph.initial().begin(), graph.initial().end(), id) == graph.initial().end())
                return {false, i, "event " + id + " is not an initial event"};
            next.insert({w, BehaviorAccess::fresh(graph, w)});
        } else {
            for (const State& s : current)
                for (State& t : transitions(graph, s))
                    if (t.first == w) next.insert(std::move(t));
            if (next.empty()) {
                bool excluded = false;
                for (const State& s : current) {
                    const auto& succ = BehaviorAccess::next(graph)[s.first];
                    if (std::find(succ.begin(), succ.end(), w) != succ.end()) excluded = true;
                }
                return {false, i,
                        excluded ? "event " + id + " is excluded by an earlier branch outcome"
                                 : "event " + id + " cannot follow " + trace[i - 1]};
            }
        }
        std::set<State> alive;
        for (const State& s : next)
            if (live(graph, s, memo)) alive.insert(s);
        if (alive.empty()) return {false, i, "no run continues after event " + id};
        current = std::move(alive);
    }
    return {};
}

}  // namespace tmkit
