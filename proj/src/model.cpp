#include "tmkit/model.hpp"

#include "tmkit/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tmkit {

bool is_valid(StageKind kind) noexcept {
    return static_cast<std::uint8_t>(kind) <= static_cast<std::uint8_t>(StageKind::Transfer);
}

std::string_view to_string(StageKind kind) {
    switch (kind) {
    case StageKind::Create: return "create";
    case StageKind::Process: return "process";
    case StageKind::Receive: return "receive";
    case StageKind::Release: return "release";
    case StageKind::Transfer: return "transfer";
    }
    return "invalid";
}

std::string_view to_string(Aspect aspect) {
    switch (aspect) {
    case Aspect::Thing: return "thing";
    case Aspect::Machine: return "machine";
    case Aspect::Dual: return "dual";
    }
    return "invalid";
}

std::string_view to_string(SwcmRole role) {
    switch (role) {
    case SwcmRole::None: return "none";
    case SwcmRole::Source: return "source";
    case SwcmRole::Transmitter: return "transmitter";
    case SwcmRole::Channel: return "channel";
    case SwcmRole::Receiver: return "receiver";
    case SwcmRole::Destination: return "destination";
    }
    return "invalid";
}

std::string_view to_string(VariableRole role) {
    switch (role) {
    case VariableRole::State: return "state";
    case VariableRole::Constant: return "constant";
    case VariableRole::Input: return "input";
    }
    return "invalid";
}

std::optional<StageKind> parse_stage_kind(std::string_view text) {
    for (StageKind k : all_stage_kinds)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::optional<Aspect> parse_aspect(std::string_view text) {
    for (Aspect a : {Aspect::Thing, Aspect::Machine, Aspect::Dual})
        if (to_string(a) == text) return a;
    return std::nullopt;
}

std::optional<SwcmRole> parse_swcm_role(std::string_view text) {
    for (SwcmRole r : {SwcmRole::None, SwcmRole::Source, SwcmRole::Transmitter, SwcmRole::Channel,
                       SwcmRole::Receiver, SwcmRole::Destination})
        if (to_string(r) == text) return r;
    return std::nullopt;
}

std::optional<VariableRole> parse_variable_role(std::string_view text) {
    for (VariableRole r : {VariableRole::State, VariableRole::Constant, VariableRole::Input})
        if (to_string(r) == text) return r;
    return std::nullopt;
}

std::string stage_id(std::string_view thimac, StageKind kind) {
    std::string id(thimac);
    id += '.';
    id += to_string(kind);
    return id;
}

std::string default_flow_id(std::string_view from, std::string_view to) {
    return std::string(from) + "->" + std::string(to);
}

std::string default_trigger_id(std::string_view from, std::string_view to) {
    return std::string(from) + "=>" + std::string(to);
}

ModelIndex::ModelIndex(const Model& model) : model_(&model) {
    for (std::size_t i = 0; i < model.stages.size(); ++i)
        elements_.try_emplace(model.stages[i].id, ElementRef{ElementType::Stage, i});
    for (std::size_t i = 0; i < model.flows.size(); ++i)
        elements_.try_emplace(model.flows[i].id, ElementRef{ElementType::Flow, i});
    for (std::size_t i = 0; i < model.triggers.size(); ++i)
        elements_.try_emplace(model.triggers[i].id, ElementRef{ElementType::Trigger, i});
    for (std::size_t i = 0; i < model.thimacs.size(); ++i) thimacs_.try_emplace(model.thimacs[i].id, i);
    for (std::size_t i = 0; i < model.variables.size(); ++i)
        variables_.try_emplace(model.variables[i].name, i);
}

std::optional<ElementRef> ModelIndex::element(std::string_view id) const {
    auto it = elements_.find(id);
    if (it == elements_.end()) return std::nullopt;
    return it->second;
}

const Stage* ModelIndex::stage(std::string_view id) const {
    auto ref = element(id);
    if (!ref || ref->type != ElementType::Stage) return nullptr;
    return &model_->stages[ref->index];
}

std::optional<std::size_t> ModelIndex::stage_position(std::string_view id) const {
    auto ref = element(id);
    if (!ref || ref->type != ElementType::Stage) return std::nullopt;
    return ref->index;
}

const Thimac* ModelIndex::thimac(std::string_view id) const {
    auto it = thimacs_.find(id);
    return it == thimacs_.end() ? nullptr : &model_->thimacs[it->second];
}

const Flow* ModelIndex::flow(std::string_view id) const {
    auto ref = element(id);
    if (!ref || ref->type != ElementType::Flow) return nullptr;
    return &model_->flows[ref->index];
}

const Trigger* ModelIndex::trigger(std::string_view id) const {
    auto ref = element(id);
    if (!ref || ref->type != ElementType::Trigger) return nullptr;
    return &model_->triggers[ref->index];
}

const Variable* ModelIndex::variable(std::string_view name) const {
    auto it = variables_.find(name);
    return it == variables_.end() ? nullptr : &model_->variables[it->second];
}

const std::string& ModelIndex::id_of(ElementRef ref) const {
    switch (ref.type) {
    case ElementType::Stage: return model_->stages.at(ref.index).id;
    case ElementType::Flow: return model_->flows.at(ref.index).id;
    case ElementType::Trigger: break;
    }
    return model_->triggers.at(ref.index).id;
}

std::size_t ModelIndex::element_count() const noexcept {
    return model_->stages.size() + model_->flows.size() + model_->triggers.size();
}

std::vector<ElementRef> ModelIndex::all_elements() const {
    std::vector<ElementRef> out;
    out.reserve(element_count());
    for (std::size_t i = 0; i < model_->stages.size(); ++i) out.push_back({ElementType::Stage, i});
    for (std::size_t i = 0; i < model_->flows.size(); ++i) out.push_back({ElementType::Flow, i});
    for (std::size_t i = 0; i < model_->triggers.size(); ++i) out.push_back({ElementType::Trigger, i});
    return out;
}

Census element_census(const Model& model) {
    Census c;
    c.thimacs = model.thimacs.size();
    c.stages = model.stages.size();
    c.flows = model.flows.size();
    c.triggers = model.triggers.size();
    c.variables = model.variables.size();
    c.rules = model.rules.size();
    for (const Stage& s : model.stages)
        if (is_valid(s.kind)) ++c.per_kind[static_cast<std::size_t>(s.kind)];
    return c;
}

bool Region::contains(std::string_view id) const {
    return std::find(elements.begin(), elements.end(), id) != elements.end();
}

namespace {

// Weak connectivity of the selected stages over the selected arcs.
bool weakly_connected(const Model& model, const ModelIndex& index, const std::set<ElementRef>& chosen) {
    std::vector<std::size_t> stages;
    for (const ElementRef& r : chosen)
        if (r.type == ElementType::Stage) stages.push_back(r.index);
    if (stages.size() <= 1) return true;

    std::vector<std::size_t> parent(model.stages.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto join = [&](const std::string& a, const std::string& b) {
        auto pa = index.stage_position(a);
        auto pb = index.stage_position(b);
        if (pa && pb) parent[find(*pa)] = find(*pb);
    };
    for (const ElementRef& r : chosen) {
        if (r.type == ElementType::Flow) join(model.flows[r.index].from, model.flows[r.index].to);
        if (r.type == ElementType::Trigger)
            join(model.triggers[r.index].from, model.triggers[r.index].to);
    }
    const std::size_t root = find(stages.front());
    return std::all_of(stages.begin(), stages.end(), [&](std::size_t s) { return find(s) == root; });
}

}  // namespace

Region subdiagram(const Model& model, const std::vector<std::string>& elements) {
    const ModelIndex index(model);
    std::set<ElementRef> chosen;
    auto add_stage = [&](const std::string& id) {
        if (auto pos = index.stage_position(id)) chosen.insert({ElementType::Stage, *pos});
    };
    for (const std::string& id : elements) {
        if (auto ref = index.element(id)) {
            chosen.insert(*ref);
            if (ref->type == ElementType::Flow) {
                add_stage(model.flows[ref->index].from);
                add_stage(model.flows[ref->index].to);
            } else if (ref->type == ElementType::Trigger) {
                add_stage(model.triggers[ref->index].from);
                add_stage(model.triggers[ref->index].to);
            }
        } else if (index.thimac(id)) {
            for (std::size_t i = 0; i < model.stages.size(); ++i)
                if (model.stages[i].owner == id) chosen.insert({ElementType::Stage, i});
        } else {
            throw Error(ErrorCode::UnknownElement, "unknown element '" + id + "'");
        }
    }
    Region region;
    region.elements.reserve(chosen.size());
    for (const ElementRef& r : chosen) region.elements.push_back(index.id_of(r));
    region.connected = weakly_connected(model, index, chosen);
    return region;
}

}  // namespace tmkit
