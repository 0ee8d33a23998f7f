#pragma once

#include "tmkit/model.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace tmkit {

/// A region of the static model that becomes an event once it happens at some time.
struct Event {
    std::string id;
    std::string description;
    Region region;
    bool data_emitting = false;
    /// Time-free state wording. Falls back to the description when empty.
    std::string state;

    friend bool operator==(const Event&, const Event&) = default;
};

struct EventOptions {
    bool allow_disconnected = false;
    bool data_emitting = false;
    std::string state;
};

class EventCatalog {
public:
    EventCatalog() = default;
    explicit EventCatalog(std::shared_ptr<const Model> model) : model_(std::move(model)) {}

    const Model& model() const { return *model_; }
    const std::shared_ptr<const Model>& model_ptr() const noexcept { return model_; }
    bool has_model() const noexcept { return model_ != nullptr; }
    const std::vector<Event>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const Event* find(std::string_view id) const;
    std::optional<std::size_t> position(std::string_view id) const;

    /// Throws Error(DuplicateEvent) for a repeated id.
    void add(Event event);

private:
    std::shared_ptr<const Model> model_;
    std::vector<Event> events_;
};

/// Builds an event over `elements`. Throws UnknownElement, DisconnectedRegion or
/// InvalidArgument for an empty element set.
Event define_event(const Model& model, const std::vector<std::string>& elements, std::string id,
                   std::string description, const EventOptions& options = {});

/// Defines the event and appends it; throws DuplicateEvent as well.
const Event& define_event(EventCatalog& catalog, const std::vector<std::string>& elements,
                          std::string id, std::string description,
                          const EventOptions& options = {});

struct Overlap {
    std::string first;
    std::string second;
    std::vector<std::string> shared;

    friend bool operator==(const Overlap&, const Overlap&) = default;
};

struct Coverage {
    std::vector<std::string> covered;
    std::vector<std::string> uncovered;
    std::vector<Overlap> overlaps;

    std::string to_text() const;
};

Coverage coverage_check(const EventCatalog& catalog);

struct StateDescription {
    std::string event;
    std::string text;

    friend bool operator==(const StateDescription&, const StateDescription&) = default;
};

std::vector<StateDescription> states_of(const EventCatalog& catalog);

/// Event a firing maps to: among events whose region holds `stage`, prefer those that also
/// hold the activating arc (`via`), then the smallest region, then catalog order.
std::optional<std::string> resolve_event(const EventCatalog& catalog, std::string_view stage,
                                         std::string_view via = {});

}  // namespace tmkit
