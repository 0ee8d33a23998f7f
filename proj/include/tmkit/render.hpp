#pragma once

#include "tmkit/behavior.hpp"
#include "tmkit/events.hpp"
#include "tmkit/model.hpp"

#include <string>
#include <vector>

namespace tmkit {

enum class RenderTarget { Static, EventsOverlay, Behavior };

struct RenderOptions {
    RenderTarget target = RenderTarget::Static;
    bool show_triggers = true;
    bool cluster_thimacs = true;
    std::vector<std::string> palette{"lightblue", "palegreen", "khaki", "lightpink",
                                     "lavender", "peachpuff", "lightcyan", "thistle"};
};

/// DOT for the static model. Flows are solid edges, triggers dashed, thimacs nested clusters.
std::string render_model(const Model& model, const RenderOptions& options = {});

/// DOT with one filled cluster per event region. Throws InvalidArgument for an empty palette.
std::string render_events(const Model& model, const EventCatalog& catalog,
                          const RenderOptions& options = {});

/// DOT for the chronology: events as nodes, recurrences as back-edges, exclusive groups as
/// same-rank diamonds, containments as clusters.
std::string render_behavior(const BehaviorGraph& graph, const RenderOptions& options = {});

}  // namespace tmkit
