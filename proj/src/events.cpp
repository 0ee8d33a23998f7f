#include "tmkit/events.hpp"

#include "tmkit/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tmkit {

const Event* EventCatalog::find(std::string_view id) const {
    auto it = std::find_if(events_.begin(), events_.end(), [&](const Event& e) { return e.id == id; });
    return it == events_.end() ? nullptr : &*it;
}

std::optional<std::size_t> EventCatalog::position(std::string_view id) const {
    for (std::size_t i = 0; i < events_.size(); ++i)
        if (events_[i].id == id) return i;
    return std::nullopt;
}

void EventCatalog::add(Event event) {
    if (find(event.id)) throw Error(ErrorCode::DuplicateEvent, "event '" + event.id + "' already defined");
    events_.push_back(std::move(event));
}

Event define_event(const Model& model, const std::vector<std::string>& elements, std::string id,
                   std::string description, const EventOptions& options) {
    if (elements.empty())
        throw Error(ErrorCode::InvalidArgument, "event '" + id + "' has an empty element set");
    Region region = subdiagram(model, elements);
    if (!region.connected && !options.allow_disconnected)
        throw Error(ErrorCode::DisconnectedRegion, "region of event '" + id + "' is not connected");
    return Event{std::move(id), std::move(description), std::move(region), options.data_emitting,
                 options.state};
}

const Event& define_event(EventCatalog& catalog, const std::vector<std::string>& elements,
                          std::string id, std::string description, const EventOptions& options) {
    if (catalog.find(id)) throw Error(ErrorCode::DuplicateEvent, "event '" + id + "' already defined");
    catalog.add(define_event(catalog.model(), elements, std::move(id), std::move(description), options));
    return catalog.events().back();
}

std::string Coverage::to_text() const {
    std::ostringstream out;
    out << "covered " << covered.size() << '\n';
    out << "uncovered " << uncovered.size() << '\n';
    for (const std::string& id : uncovered) out << "  " << id << '\n';
    out << "overlaps " << overlaps.size() << '\n';
    for (const Overlap& o : overlaps) {
        out << "  " << o.first << ' ' << o.second << ':';
        for (const std::string& id : o.shared) out << ' ' << id;
        out << '\n';
    }
    return out.str();
}

Coverage coverage_check(const EventCatalog& catalog) {
    Coverage result;
    const ModelIndex index(catalog.model());
    std::set<std::string> covered;
    for (const Event& e : catalog.events()) covered.insert(e.region.elements.begin(), e.region.elements.end());
    for (const ElementRef& ref : index.all_elements()) {
        const std::string& id = index.id_of(ref);
        (covered.count(id) ? result.covered : result.uncovered).push_back(id);
    }
    const auto& events = catalog.events();
    for (std::size_t i = 0; i < events.size(); ++i) {
        for (std::size_t j = i + 1; j < events.size(); ++j) {
            Overlap o{events[i].id, events[j].id, {}};
            // Region element lists share the model's canonical order.
            for (const std::string& id : events[i].region.elements)
                if (events[j].region.contains(id)) o.shared.push_back(id);
            if (!o.shared.empty()) result.overlaps.push_back(std::move(o));
        }
    }
    return result;
}

std::vector<StateDescription> states_of(const EventCatalog& catalog) {
    std::vector<StateDescription> out;
    out.reserve(catalog.size());
    for (const Event& e : catalog.events())
        out.push_back({e.id, e.state.empty() ? e.description : e.state});
    return out;
}

std::optional<std::string> resolve_event(const EventCatalog& catalog, std::string_view stage,
                                         std::string_view via) {
    const Event* best = nullptr;
    bool best_has_via = false;
    for (const Event& e : catalog.events()) {
        if (!e.region.contains(stage)) continue;
        const bool has_via = !via.empty() && e.region.contains(via);
        if (!best || (has_via && !best_has_via) ||
            (has_via == best_has_via && e.region.elements.size() < best->region.elements.size())) {
            best = &e;
            best_has_via = has_via;
        }
    }
    if (!best) return std::nullopt;
    return best->id;
}

}  // namespace tmkit
