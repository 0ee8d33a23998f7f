#include "tmkit/trace_io.hpp"

#include "tmkit/expr.hpp"

#include <json.hpp>

#include <sstream>

namespace tmkit {

std::string trace_to_tsv(const Trace& trace, bool header) {
    std::ostringstream out;
    if (header) {
        out << "# tmkit-trace model=" << trace.model << " seed=" << trace.seed << '\n';
        out << "# tick\tstage\tthing\tevent\tvariables\n";
    }
    for (const TraceEntry& e : trace.entries) {
        out << e.tick << '\t' << e.stage << '\t' << e.thing << '\t' << (e.event ? *e.event : "-") << '\t';
        for (std::size_t i = 0; i < e.variables.size() && i < trace.variable_names.size(); ++i)
            out << (i ? "," : "") << trace.variable_names[i] << '=' << format_number(e.variables[i]);
        out << '\n';
    }
    for (const std::string& w : trace.warnings) out << "# warning: " << w << '\n';
    return out.str();
}

std::string trace_to_jsonl(const Trace& trace) {
    std::string out;
    for (const TraceEntry& e : trace.entries) {
        nlohmann::ordered_json j;
        j["tick"] = e.tick;
        j["stage"] = e.stage;
        j["thing"] = e.thing;
        j["event"] = e.event ? nlohmann::ordered_json(*e.event) : nlohmann::ordered_json(nullptr);
        j["via"] = e.via;
        nlohmann::ordered_json vars = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < e.variables.size() && i < trace.variable_names.size(); ++i)
            vars[trace.variable_names[i]] = e.variables[i];
        j["variables"] = vars;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string ticks_to_tsv(const Trace& trace) {
    std::ostringstream out;
    out << "tick";
    for (const std::string& n : trace.variable_names) out << '\t' << n;
    out << '\n';
    for (const TickSnapshot& t : trace.ticks) {
        out << t.tick;
        for (double v : t.variables) out << '\t' << format_number(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace tmkit
