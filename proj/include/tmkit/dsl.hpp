#pragma once

#include "tmkit/behavior.hpp"
#include "tmkit/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tmkit {

struct SourceText {
    std::string text;
    std::string origin = "<inline>";
};

/// Reads a file as UTF-8 text. Throws Error(Io).
SourceText read_source(const std::string& path);

enum class Severity { Error, Warning };

struct ParseDiagnostic {
    Severity severity = Severity::Error;
    std::size_t line = 1;
    std::size_t column = 1;
    std::string message;

    /// "origin:line:column: error: message"
    std::string to_text(const std::string& origin) const;
    friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

/// Event as declared in the catalog section, before region construction.
struct EventDecl {
    std::string id;
    std::string description;
    std::vector<std::string> elements;
    bool data_emitting = false;
    std::string state;

    friend bool operator==(const EventDecl&, const EventDecl&) = default;
};

/// Everything a `.tm` file declares.
struct Document {
    Model model;
    std::vector<EventDecl> events;
    BehaviorSpec behavior;

    friend bool operator==(const Document&, const Document&) = default;
};

struct ParseOptions {
    /// When false, unresolved stage, thimac and arc references become warnings and are kept
    /// in the model so that validation can report them.
    bool strict_references = true;
};

struct ParseResult {
    std::optional<Document> document;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const noexcept { return document.has_value(); }
    std::size_t error_count() const;
};

ParseResult parse(const SourceText& source, const ParseOptions& options = {});

std::string serialize(const Document& document);
std::string serialize(const Model& model);

}  // namespace tmkit
