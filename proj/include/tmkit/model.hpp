#pragma once

#include "tmkit/expr.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmkit {

/// The five generic actions a machine performs.
enum class StageKind : std::uint8_t { Create, Process, Receive, Release, Transfer };

inline constexpr std::array<StageKind, 5> all_stage_kinds{
    StageKind::Create, StageKind::Process, StageKind::Receive, StageKind::Release,
    StageKind::Transfer};

enum class Aspect : std::uint8_t { Thing, Machine, Dual };

/// Position of a thimac in the source -> transmitter -> channel -> receiver -> destination chain.
enum class SwcmRole : std::uint8_t { None, Source, Transmitter, Channel, Receiver, Destination };

enum class VariableRole : std::uint8_t { State, Constant, Input };

bool is_valid(StageKind kind) noexcept;
std::string_view to_string(StageKind kind);
std::string_view to_string(Aspect aspect);
std::string_view to_string(SwcmRole role);
std::string_view to_string(VariableRole role);
std::optional<StageKind> parse_stage_kind(std::string_view text);
std::optional<Aspect> parse_aspect(std::string_view text);
std::optional<SwcmRole> parse_swcm_role(std::string_view text);
std::optional<VariableRole> parse_variable_role(std::string_view text);

/// Canonical stage id: "<thimac>.<kind>".
std::string stage_id(std::string_view thimac, StageKind kind);
/// Default ids for arcs declared without a name.
std::string default_flow_id(std::string_view from, std::string_view to);
std::string default_trigger_id(std::string_view from, std::string_view to);

struct Thimac {
    std::string id;
    std::string name;
    Aspect aspect = Aspect::Dual;
    std::optional<std::string> parent;
    SwcmRole swcm_role = SwcmRole::None;

    friend bool operator==(const Thimac&, const Thimac&) = default;
};

struct Stage {
    std::string id;
    StageKind kind = StageKind::Create;
    std::string owner;
    std::string label;

    friend bool operator==(const Stage&, const Stage&) = default;
};

struct Flow {
    std::string id;
    std::string from;
    std::string to;

    friend bool operator==(const Flow&, const Flow&) = default;
};

struct Trigger {
    std::string id;
    std::string from;
    std::string to;
    /// When set, fires only while the source stage handles a thing created by this thimac.
    std::optional<std::string> guard;

    friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct Variable {
    std::string name;
    VariableRole role = VariableRole::State;
    double value = 0.0;
    std::string unit;

    friend bool operator==(const Variable&, const Variable&) = default;
};

struct Assignment {
    std::string target;
    Expr value;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Outcome {
    std::string label;
    Expr probability;
    std::string trigger;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Behaviour attached to a Create or Process stage.
struct UpdateRule {
    enum class Kind : std::uint8_t { Deterministic, Stochastic };

    std::string stage;
    Kind kind = Kind::Deterministic;
    std::vector<Assignment> assignments;
    std::vector<Outcome> outcomes;

    friend bool operator==(const UpdateRule&, const UpdateRule&) = default;
};

struct Model {
    std::string name;
    std::vector<Thimac> thimacs;
    std::vector<Stage> stages;
    std::vector<Flow> flows;
    std::vector<Trigger> triggers;
    std::vector<Variable> variables;
    std::vector<UpdateRule> rules;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Elements that can be placed in a region: stages, flows and triggers.
enum class ElementType : std::uint8_t { Stage, Flow, Trigger };

struct ElementRef {
    ElementType type = ElementType::Stage;
    std::size_t index = 0;

    friend auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

/// Id lookup over a model. First declaration wins for duplicated ids.
class ModelIndex {
public:
    explicit ModelIndex(const Model& model);

    const Model& model() const noexcept { return *model_; }

    std::optional<ElementRef> element(std::string_view id) const;
    const Stage* stage(std::string_view id) const;
    const Thimac* thimac(std::string_view id) const;
    const Flow* flow(std::string_view id) const;
    const Trigger* trigger(std::string_view id) const;
    const Variable* variable(std::string_view name) const;
    std::optional<std::size_t> stage_position(std::string_view id) const;

    const std::string& id_of(ElementRef ref) const;
    std::size_t element_count() const noexcept;
    /// All elements in canonical order: stages, then flows, then triggers.
    std::vector<ElementRef> all_elements() const;

private:
    const Model* model_;
    std::map<std::string, ElementRef, std::less<>> elements_;
    std::map<std::string, std::size_t, std::less<>> thimacs_;
    std::map<std::string, std::size_t, std::less<>> variables_;
};

struct Census {
    std::size_t thimacs = 0;
    std::size_t stages = 0;
    std::size_t flows = 0;
    std::size_t triggers = 0;
    std::size_t variables = 0;
    std::size_t rules = 0;
    std::array<std::size_t, 5> per_kind{};

    std::size_t of(StageKind kind) const { return per_kind[static_cast<std::size_t>(kind)]; }

    friend bool operator==(const Census&, const Census&) = default;
};

Census element_census(const Model& model);

/// Induced subdiagram of a model.
struct Region {
    /// Ids in canonical element order.
    std::vector<std::string> elements;
    bool connected = true;

    bool contains(std::string_view id) const;
    friend bool operator==(const Region&, const Region&) = default;
};

/// Builds the region induced by `elements`. Arc endpoints are added; thimac ids expand to
/// the thimac's own stages. Throws Error(UnknownElement) naming the first missing id.
Region subdiagram(const Model& model, const std::vector<std::string>& elements);

}  // namespace tmkit
