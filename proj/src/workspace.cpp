#include "tmkit/workspace.hpp"

#include "tmkit/error.hpp"

namespace tmkit {

Workspace assemble(Document document, bool allow_disconnected) {
    Workspace ws;
    auto model = std::make_shared<const Model>(std::move(document.model));
    auto catalog = std::make_shared<EventCatalog>(model);
    for (EventDecl& e : document.events) {
        EventOptions options;
        options.allow_disconnected = allow_disconnected;
        options.data_emitting = e.data_emitting;
        options.state = std::move(e.state);
        define_event(*catalog, e.elements, std::move(e.id), std::move(e.description), options);
    }
    ws.model = model;
    ws.catalog = catalog;
    if (!catalog->empty()) ws.graph = build_behavior(catalog, std::move(document.behavior));
    return ws;
}

std::string render(const Workspace& workspace, const RenderOptions& options) {
    if (!workspace.model) throw Error(ErrorCode::InvalidArgument, "nothing to render");
    switch (options.target) {
    case RenderTarget::Static:
        return render_model(*workspace.model, options);
    case RenderTarget::EventsOverlay:
        if (!workspace.catalog || workspace.catalog->empty())
            throw Error(ErrorCode::InvalidArgument, "event overlay needs an event catalog");
        return render_events(*workspace.model, *workspace.catalog, options);
    case RenderTarget::Behavior:
        if (!workspace.graph) throw Error(ErrorCode::InvalidArgument, "behavior view needs a behavior graph");
        return render_behavior(*workspace.graph, options);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown render target");
}

const std::vector<BundledModel>& bundled_models() {
    static const std::vector<BundledModel> models{
        {"predator_prey", "predator_prey.tm", "hare and lynx populations with recurrent updates"},
        {"tile", "tile.tm", "a tile blown off a roof by the wind, hitting or missing a man"},
        {"coin", "coin.tm", "a coin toss communicated from source to destination"},
    };
    return models;
}

}  // namespace tmkit
