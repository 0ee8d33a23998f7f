#include "tmkit/validate.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace tmkit {

std::string rule_code(Rule rule) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "TM%02u", static_cast<unsigned>(rule));
    return buf;
}

std::string_view rule_name(Rule rule) {
    switch (rule) {
    case Rule::DanglingReference: return "dangling-reference";
    case Rule::DuplicateId: return "duplicate-id";
    case Rule::StageKindClosure: return "stage-kind";
    case Rule::ParentCycle: return "parent-cycle";
    case Rule::DuplicateStageKind: return "duplicate-stage-kind";
    case Rule::DuplicateSwcmRole: return "duplicate-swcm-role";
    case Rule::RuleOnIllegalStage: return "rule-stage";
    case Rule::CrossMachineFlow: return "cross-machine-flow";
    case Rule::IntraMachineFlow: return "intra-machine-flow";
    case Rule::TriggerTarget: return "trigger-target";
    case Rule::TriggerDuplicatesFlow: return "trigger-duplicates-flow";
    case Rule::IntraMachineCycle: return "intra-machine-cycle";
    case Rule::DuplicateVariable: return "duplicate-variable";
    case Rule::InvalidUpdateRule: return "invalid-update-rule";
    }
    return "unknown";
}

bool ValidationReport::has(Rule rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    for (const Violation& v : violations)
        out << rule_code(v.rule) << ' ' << rule_name(v.rule) << ' ' << v.element << ": " << v.message
            << '\n';
    return out.str();
}

const std::vector<std::pair<StageKind, StageKind>>& intra_machine_flow_table() {
    using K = StageKind;
    static const std::vector<std::pair<K, K>> table{
        {K::Create, K::Release},   {K::Create, K::Process},  {K::Process, K::Release},
        {K::Receive, K::Process},  {K::Receive, K::Release}, {K::Release, K::Transfer},
        {K::Transfer, K::Receive},
    };
    return table;
}

bool intra_machine_flow_allowed(StageKind from, StageKind to) {
    const auto& table = intra_machine_flow_table();
    return std::find(table.begin(), table.end(), std::pair{from, to}) != table.end();
}

namespace {

class Checker {
public:
    explicit Checker(const Model& model) : model_(model), index_(model) {}

    ValidationReport run() {
        check_ids();
        check_thimacs();
        check_stages();
        check_flows();
        check_triggers();
        check_intra_cycles();
        check_variables();
        check_rules();
        std::sort(report_.violations.begin(), report_.violations.end(),
                  [](const Violation& a, const Violation& b) {
                      return std::tie(a.rule, a.element, a.message) <
                             std::tie(b.rule, b.element, b.message);
                  });
        return std::move(report_);
    }

private:
    const Model& model_;
    ModelIndex index_;
    ValidationReport report_;

    void add(Rule rule, const std::string& element, std::string message) {
        report_.violations.push_back({rule, element, std::move(message)});
    }

    void check_ids() {
        std::set<std::string> seen;
        auto note = [&](const std::string& id, std::string_view what) {
            if (!seen.insert(id).second) add(Rule::DuplicateId, id, std::string(what) + " id declared twice");
        };
        for (const Stage& s : model_.stages) note(s.id, "stage");
        for (const Flow& f : model_.flows) note(f.id, "flow");
        for (const Trigger& t : model_.triggers) note(t.id, "trigger");
        std::set<std::string> thimacs;
        for (const Thimac& t : model_.thimacs)
            if (!thimacs.insert(t.id).second) add(Rule::DuplicateId, t.id, "thimac id declared twice");
    }

    void check_thimacs() {
        std::map<SwcmRole, std::string> roles;
        for (const Thimac& t : model_.thimacs) {
            if (t.parent && !index_.thimac(*t.parent))
                add(Rule::DanglingReference, t.id, "parent '" + *t.parent + "' does not exist");
            if (t.swcm_role != SwcmRole::None) {
                auto [it, fresh] = roles.try_emplace(t.swcm_role, t.id);
                if (!fresh)
                    add(Rule::DuplicateSwcmRole, t.id,
                        "role " + std::string(to_string(t.swcm_role)) + " already held by '" + it->second + "'");
            }
        }
        // A thimac lies on a parent cycle iff walking up from it returns to it.
        for (const Thimac& t : model_.thimacs) {
            std::set<std::string> visited{t.id};
            const Thimac* cur = &t;
            while (cur->parent) {
                const Thimac* up = index_.thimac(*cur->parent);
                if (!up) break;
                if (up->id == t.id) {
                    add(Rule::ParentCycle, t.id, "parent links form a cycle");
                    break;
                }
                if (!visited.insert(up->id).second) break;
                cur = up;
            }
        }
    }

    void check_stages() {
        std::set<std::pair<std::string, StageKind>> owned;
        for (const Stage& s : model_.stages) {
            if (!is_valid(s.kind)) {
                add(Rule::StageKindClosure, s.id, "stage kind is not one of the five generic actions");
                continue;
            }
            if (!index_.thimac(s.owner)) {
                add(Rule::DanglingReference, s.id, "owner '" + s.owner + "' does not exist");
                continue;
            }
            if (!owned.insert({s.owner, s.kind}).second)
                add(Rule::DuplicateStageKind, s.id,
                    "'" + s.owner + "' already owns a " + std::string(to_string(s.kind)) + " stage");
        }
    }

    // Both endpoints resolve to stages with valid kinds; otherwise reports and returns false.
    bool endpoints(const std::string& id, const std::string& from, const std::string& to,
                   const Stage*& a, const Stage*& b) {
        a = index_.stage(from);
        b = index_.stage(to);
        if (!a) add(Rule::DanglingReference, id, "source stage '" + from + "' does not exist");
        if (!b) add(Rule::DanglingReference, id, "target stage '" + to + "' does not exist");
        return a && b && is_valid(a->kind) && is_valid(b->kind);
    }

    void check_flows() {
        for (const Flow& f : model_.flows) {
            const Stage* a;
            const Stage* b;
            if (!endpoints(f.id, f.from, f.to, a, b)) continue;
            if (a->owner != b->owner) {
                if (a->kind != StageKind::Transfer || b->kind != StageKind::Transfer)
                    add(Rule::CrossMachineFlow, f.id,
                        "flow between machines must go transfer -> transfer, not " +
                            std::string(to_string(a->kind)) + " -> " + std::string(to_string(b->kind)));
            } else if (!intra_machine_flow_allowed(a->kind, b->kind)) {
                add(Rule::IntraMachineFlow, f.id,
                    std::string(to_string(a->kind)) + " -> " + std::string(to_string(b->kind)) +
                        " is not an allowed flow inside a machine");
            }
        }
    }

    void check_triggers() {
        std::set<std::pair<std::string, std::string>> flow_arcs;
        for (const Flow& f : model_.flows) flow_arcs.insert({f.from, f.to});
        for (const Trigger& t : model_.triggers) {
            if (t.guard && !index_.thimac(*t.guard))
                add(Rule::DanglingReference, t.id, "guard thimac '" + *t.guard + "' does not exist");
            const Stage* a;
            const Stage* b;
            if (!endpoints(t.id, t.from, t.to, a, b)) continue;
            if (b->kind != StageKind::Create)
                add(Rule::TriggerTarget, t.id,
                    "trigger must land on a create stage, not " + std::string(to_string(b->kind)));
            if (flow_arcs.count({t.from, t.to}))
                add(Rule::TriggerDuplicatesFlow, t.id, "a flow already connects these stages");
        }
    }

    // Transfer stages are split into an entry port (arcs leaving it) and an exit port (arcs
    // reaching it), so a machine that both imports and exports things is not a cycle.
    void check_intra_cycles() {
        const std::size_t n = model_.stages.size();
        auto node_out = [&](std::size_t s) { return model_.stages[s].kind == StageKind::Transfer ? n + s : s; };
        std::vector<std::vector<std::size_t>> adj(2 * n);
        std::map<std::pair<std::size_t, std::size_t>, std::string> arc_id;
        for (const Flow& f : model_.flows) {
            auto pa = index_.stage_position(f.from);
            auto pb = index_.stage_position(f.to);
            if (!pa || !pb) continue;
            const Stage& a = model_.stages[*pa];
            const Stage& b = model_.stages[*pb];
            if (a.owner != b.owner || !is_valid(a.kind) || !is_valid(b.kind)) continue;
            const std::size_t src = *pa;
            const std::size_t dst = node_out(*pb);
            adj[src].push_back(dst);
            arc_id.try_emplace({src, dst}, f.id);
        }
        std::vector<int> color(2 * n, 0);
        std::set<std::string> reported;
        auto dfs = [&](auto&& self, std::size_t u) -> void {
            color[u] = 1;
            for (std::size_t v : adj[u]) {
                if (color[v] == 1) {
                    const std::string& id = arc_id[{u, v}];
                    if (reported.insert(id).second)
                        add(Rule::IntraMachineCycle, id, "flow closes a cycle inside machine '" +
                                                             model_.stages[u % n].owner + "'");
                } else if (color[v] == 0) {
                    self(self, v);
                }
            }
            color[u] = 2;
        };
        for (std::size_t u = 0; u < 2 * n; ++u)
            if (color[u] == 0) dfs(dfs, u);
    }

    void check_variables() {
        std::set<std::string> names;
        for (const Variable& v : model_.variables)
            if (!names.insert(v.name).second) add(Rule::DuplicateVariable, v.name, "variable declared twice");
    }

    void check_rules() {
        std::set<std::string> ruled;
        for (const UpdateRule& r : model_.rules) {
            const Stage* s = index_.stage(r.stage);
            if (!s) {
                add(Rule::DanglingReference, r.stage, "rule attached to a stage that does not exist");
                continue;
            }
            if (!ruled.insert(r.stage).second)
                add(Rule::InvalidUpdateRule, r.stage, "stage carries more than one rule");
            if (s->kind != StageKind::Create && s->kind != StageKind::Process)
                add(Rule::RuleOnIllegalStage, r.stage,
                    "rules attach to create or process stages, not " + std::string(to_string(s->kind)));
            auto check_expr = [&](const Expr& e) {
                for (const std::string& name : e.variables())
                    if (!index_.variable(name))
                        add(Rule::InvalidUpdateRule, r.stage, "expression uses undeclared variable '" + name + "'");
            };
            if (r.kind == UpdateRule::Kind::Deterministic) {
                if (r.assignments.empty()) add(Rule::InvalidUpdateRule, r.stage, "rule has no assignments");
                std::set<std::string> targets;
                for (const Assignment& a : r.assignments) {
                    const Variable* v = index_.variable(a.target);
                    if (!v)
                        add(Rule::InvalidUpdateRule, r.stage, "assignment to undeclared variable '" + a.target + "'");
                    else if (v->role == VariableRole::Constant)
                        add(Rule::InvalidUpdateRule, r.stage, "assignment to constant '" + a.target + "'");
                    if (!targets.insert(a.target).second)
                        add(Rule::InvalidUpdateRule, r.stage, "variable '" + a.target + "' assigned twice");
                    check_expr(a.value);
                }
            } else {
                if (r.outcomes.empty()) add(Rule::InvalidUpdateRule, r.stage, "stochastic rule has no outcomes");
                std::set<std::string> labels;
                for (const Outcome& o : r.outcomes) {
                    if (!labels.insert(o.label).second)
                        add(Rule::InvalidUpdateRule, r.stage, "outcome '" + o.label + "' declared twice");
                    check_expr(o.probability);
                    const Trigger* t = index_.trigger(o.trigger);
                    if (!t)
                        add(Rule::DanglingReference, r.stage, "outcome '" + o.label + "' names unknown trigger '" + o.trigger + "'");
                    else if (t->from != r.stage)
                        add(Rule::InvalidUpdateRule, r.stage,
                            "outcome '" + o.label + "' names trigger '" + o.trigger + "' that does not leave this stage");
                }
            }
        }
    }
};

}  // namespace

ValidationReport validate_static(const Model& model) { return Checker(model).run(); }

}  // namespace tmkit
