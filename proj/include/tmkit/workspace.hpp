#pragma once

#include "tmkit/behavior.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/events.hpp"
#include "tmkit/model.hpp"
#include "tmkit/render.hpp"

#include <memory>
#include <optional>
#include <string>

namespace tmkit {

/// A parsed document with its catalog and behavior graph built.
struct Workspace {
    std::shared_ptr<const Model> model;
    std::shared_ptr<const EventCatalog> catalog;
    std::optional<BehaviorGraph> graph;
};

/// Defines every declared event and builds the behavior graph when the document has events.
/// Throws the errors of define_event and build_behavior.
Workspace assemble(Document document, bool allow_disconnected = false);

/// Dispatches on options.target. Throws InvalidArgument when the overlay has no catalog or
/// the behavior view has no graph.
std::string render(const Workspace& workspace, const RenderOptions& options);

struct BundledModel {
    std::string name;
    std::string file;
    std::string provenance;
};

/// The three shipped models, in a fixed order.
const std::vector<BundledModel>& bundled_models();

}  // namespace tmkit
