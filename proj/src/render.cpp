#include "tmkit/render.hpp"

#include "tmkit/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tmkit {

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

void stage_node(std::ostringstream& out, const Stage& s, int depth) {
    out << indent(depth) << quote(s.id) << " [label=" << quote(s.owner + "." + std::string(to_string(s.kind)));
    if (!s.label.empty()) out << ", xlabel=" << quote(s.label);
    out << "];\n";
}

void arcs(std::ostringstream& out, const Model& model, const RenderOptions& options) {
    for (const Flow& f : model.flows) {
        out << "  " << quote(f.from) << " -> " << quote(f.to) << " [style=solid";
        if (f.id != default_flow_id(f.from, f.to)) out << ", label=" << quote(f.id);
        out << "];\n";
    }
    if (!options.show_triggers) return;
    for (const Trigger& t : model.triggers) {
        out << "  " << quote(t.from) << " -> " << quote(t.to) << " [style=dashed";
        std::string label;
        if (t.id != default_trigger_id(t.from, t.to)) label = t.id;
        if (t.guard) label += (label.empty() ? "" : " ") + std::string("when ") + *t.guard;
        if (!label.empty()) out << ", label=" << quote(label);
        out << "];\n";
    }
}

void thimac_cluster(std::ostringstream& out, const Model& model, std::size_t t,
                    const std::map<std::string, std::vector<std::size_t>>& children, std::set<std::size_t>& done,
                    int depth) {
    if (!done.insert(t).second) return;
    const Thimac& th = model.thimacs[t];
    out << indent(depth) << "subgraph " << quote("cluster_" + th.id) << " {\n";
    std::string label = th.id;
    if (!th.name.empty() && th.name != th.id) label += "\n" + th.name;
    out << indent(depth + 1) << "label=" << quote(label) << ";\n";
    for (const Stage& s : model.stages)
        if (s.owner == th.id) stage_node(out, s, depth + 1);
    if (auto it = children.find(th.id); it != children.end())
        for (std::size_t c : it->second) thimac_cluster(out, model, c, children, done, depth + 1);
    out << indent(depth) << "}\n";
}

}  // namespace

std::string render_model(const Model& model, const RenderOptions& options) {
    std::ostringstream out;
    out << "digraph " << quote(model.name) << " {\n";
    out << "  node [shape=box];\n";
    if (options.cluster_thimacs) {
        std::map<std::string, std::size_t> by_id;
        for (std::size_t i = 0; i < model.thimacs.size(); ++i) by_id.try_emplace(model.thimacs[i].id, i);
        std::map<std::string, std::vector<std::size_t>> children;
        std::vector<std::size_t> roots;
        for (std::size_t i = 0; i < model.thimacs.size(); ++i) {
            const auto& parent = model.thimacs[i].parent;
            if (parent && by_id.count(*parent) && *parent != model.thimacs[i].id)
                children[*parent].push_back(i);
            else
                roots.push_back(i);
        }
        std::set<std::size_t> done;
        for (std::size_t r : roots) thimac_cluster(out, model, r, children, done, 1);
        // Thimacs only reachable through a parent cycle.
        for (std::size_t i = 0; i < model.thimacs.size(); ++i) thimac_cluster(out, model, i, children, done, 1);
        for (const Stage& s : model.stages)
            if (!by_id.count(s.owner)) stage_node(out, s, 1);
    } else {
        for (const Stage& s : model.stages) stage_node(out, s, 1);
    }
    arcs(out, model, options);
    out << "}\n";
    return out.str();
}

std::string render_events(const Model& model, const EventCatalog& catalog, const RenderOptions& options) {
    if (options.palette.empty()) throw Error(ErrorCode::InvalidArgument, "event overlay needs a nonempty palette");
    std::ostringstream out;
    out << "digraph " << quote(model.name) << " {\n";
    out << "  node [shape=box];\n";
    std::set<std::string> declared;
    const ModelIndex index(model);
    for (std::size_t e = 0; e < catalog.size(); ++e) {
        const Event& ev = catalog.events()[e];
        out << "  subgraph " << quote("cluster_" + ev.id) << " {\n";
        out << "    label=" << quote(ev.id + ": " + ev.description) << ";\n";
        out << "    style=filled;\n";
        out << "    fillcolor=" << quote(options.palette[e % options.palette.size()]) << ";\n";
        for (const std::string& id : ev.region.elements) {
            const Stage* s = index.stage(id);
            if (!s) continue;
            if (declared.insert(id).second)
                stage_node(out, *s, 2);
            else
                out << "    " << quote(id) << ";\n";
        }
        out << "  }\n";
    }
    for (const Stage& s : model.stages)
        if (declared.insert(s.id).second) stage_node(out, s, 1);
    arcs(out, model, options);
    out << "}\n";
    return out.str();
}

std::string render_behavior(const BehaviorGraph& graph, const RenderOptions& options) {
    (void)options;
    const EventCatalog& catalog = graph.catalog();
    const BehaviorSpec& spec = graph.spec();
    std::set<std::string> exclusive;
    for (const auto& g : spec.exclusive_groups) exclusive.insert(g.begin(), g.end());

    std::ostringstream out;
    out << "digraph behavior {\n";
    out << "  node [shape=ellipse];\n";
    for (const std::string& id : graph.events()) {
        const Event* e = catalog.find(id);
        out << "  " << quote(id) << " [label=" << quote(id + "\n" + e->description);
        if (exclusive.count(id)) out << ", shape=diamond";
        out << "];\n";
    }
    for (const Containment& c : spec.containments) {
        out << "  subgraph " << quote("cluster_" + c.container) << " {\n";
        out << "    label=" << quote(c.container + ": " + catalog.find(c.container)->description) << ";\n";
        for (const std::string& id : c.contained)
            if (graph.participates(id)) out << "    " << quote(id) << ";\n";
        out << "  }\n";
    }
    std::set<std::string> ranked;
    for (const auto& g : spec.exclusive_groups) {
        if (std::any_of(g.begin(), g.end(), [&](const std::string& id) { return ranked.count(id); })) continue;
        out << "  { rank=same;";
        for (const std::string& id : g) {
            out << ' ' << quote(id) << ';';
            ranked.insert(id);
        }
        out << " }\n";
    }
    for (const auto& [a, b] : spec.successions) out << "  " << quote(a) << " -> " << quote(b) << ";\n";
    for (const auto& [a, b] : spec.recurrences)
        out << "  " << quote(a) << " -> " << quote(b) << " [style=bold, constraint=false, label=\"recur\"];\n";
    out << "}\n";
    return out.str();
}

}  // namespace tmkit
