#pragma once

#include "tmkit/events.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace tmkit {

using EventEdge = std::pair<std::string, std::string>;

struct Containment {
    std::string container;
    std::vector<std::string> contained;

    friend bool operator==(const Containment&, const Containment&) = default;
};

/// Declarative chronology as written in a model file.
struct BehaviorSpec {
    std::vector<EventEdge> successions;
    /// Back-edges (from, to). A self-loop repeats a single event.
    std::vector<EventEdge> recurrences;
    std::vector<std::vector<std::string>> exclusive_groups;
    std::vector<Containment> containments;

    bool empty() const noexcept {
        return successions.empty() && recurrences.empty() && exclusive_groups.empty() &&
               containments.empty();
    }
    friend bool operator==(const BehaviorSpec&, const BehaviorSpec&) = default;
};

/// Validated chronology of events.
class BehaviorGraph {
public:
    const EventCatalog& catalog() const { return *catalog_; }
    const BehaviorSpec& spec() const noexcept { return spec_; }

    /// Events taking part in the chronology, catalog order.
    const std::vector<std::string>& events() const noexcept { return events_; }
    const std::vector<std::string>& initial() const noexcept { return initial_; }
    const std::vector<std::string>& terminal() const noexcept { return terminal_; }
    bool participates(std::string_view id) const;
    bool is_terminal(std::string_view id) const;
    bool has_recurrence_from(std::string_view id) const;
    std::vector<std::string> successors(std::string_view id) const;

    /// Events on some succession path from the recurrence target to its source.
    std::vector<std::string> recurrence_span(const EventEdge& recurrence) const;

private:
    friend BehaviorGraph build_behavior(std::shared_ptr<const EventCatalog>, BehaviorSpec);
    friend struct BehaviorAccess;

    std::shared_ptr<const EventCatalog> catalog_;
    BehaviorSpec spec_;
    std::vector<std::string> events_;
    std::vector<std::string> initial_;
    std::vector<std::string> terminal_;
    std::vector<std::vector<std::size_t>> next_;
    std::vector<std::vector<std::size_t>> recur_;
    std::vector<std::vector<std::size_t>> groups_of_;
    std::size_t group_count_ = 0;
};

/// Throws UnknownEvent, ContainmentViolation, EmptyGraph, or InvalidArgument when the
/// successions (recurrences excluded) contain a cycle or a group repeats a member.
BehaviorGraph build_behavior(std::shared_ptr<const EventCatalog> catalog, BehaviorSpec spec);

using Run = std::vector<std::string>;

struct EnumerateOptions {
    std::size_t max_recurrence = 0;
    /// Hard limit on the number of runs; exceeding it throws RunCapExceeded.
    std::size_t max_runs = 100000;
};

/// Every maximal initial-to-terminal run with each recurrence unrolled at most
/// `max_recurrence` times, in lexicographic order of catalog positions.
std::vector<Run> enumerate_runs(const BehaviorGraph& graph, const EnumerateOptions& options = {});

struct Verdict {
    bool conformant = true;
    std::size_t index = 0;
    std::string reason;

    std::string to_text() const;
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Conformant iff `trace` is a prefix of some run with unbounded recurrence.
/// Throws UnknownEvent for ids outside the catalog.
Verdict conforms(const std::vector<std::string>& trace, const BehaviorGraph& graph);

}  // namespace tmkit
