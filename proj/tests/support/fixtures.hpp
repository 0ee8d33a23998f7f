#pragma once

#include "tmkit/dsl.hpp"
#include "tmkit/workspace.hpp"

#include <stdexcept>
#include <string>

namespace tmtest {

inline std::string model_path(const std::string& name) { return std::string(TMKIT_MODELS_DIR) + "/" + name + ".tm"; }

inline tmkit::Document load_document(const std::string& name) {
    tmkit::ParseResult r = tmkit::parse(tmkit::read_source(model_path(name)));
    if (!r.ok()) throw std::runtime_error(name + ": " + r.diagnostics.front().message);
    return *r.document;
}

inline tmkit::Workspace load_workspace(const std::string& name) { return tmkit::assemble(load_document(name)); }

inline tmkit::Document parse_text(const std::string& text) {
    tmkit::ParseResult r = tmkit::parse({text, "<test>"});
    if (!r.ok()) throw std::runtime_error(r.diagnostics.front().to_text("<test>"));
    return *r.document;
}

}  // namespace tmtest
